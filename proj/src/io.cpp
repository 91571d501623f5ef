#include "feedcap/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace feedcap {

namespace {

Json matrix_to_json(const Mat& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Mat matrix_from_json(const Json& j, int expect_cols = -1) {
  if (!j.is_array()) throw ValidationError("matrix JSON must be an array of rows");
  const int rows = static_cast<int>(j.size());
  if (rows == 0) return Mat(0, expect_cols >= 0 ? expect_cols : 0);
  const int cols = static_cast<int>(j.at(0).size());
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j.at(i).size()) != cols) {
      throw ValidationError("matrix JSON rows have inconsistent lengths");
    }
    for (int c = 0; c < cols; ++c) m(i, c) = j.at(i).at(c).get<double>();
  }
  return m;
}

Json vector_to_json(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vec vector_from_json(const Json& j) {
  Vec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<int>(i)) = j.at(i).get<double>();
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << std::setprecision(17);
  return out;
}

}  // namespace

Json system_to_json(const StateSpaceSystem& sys) {
  return Json{{"A", matrix_to_json(sys.A)},
              {"B", matrix_to_json(sys.B)},
              {"C", matrix_to_json(sys.C)},
              {"D", matrix_to_json(sys.D)}};
}

StateSpaceSystem system_from_json(const Json& j) {
  const Mat a = matrix_from_json(j.at("A"));
  const Mat d = matrix_from_json(j.at("D"));
  const int n = static_cast<int>(a.rows());
  Mat b = matrix_from_json(j.at("B"));
  Mat c = matrix_from_json(j.at("C"));
  // A memoryless system serializes with empty A/B/C; restore the 0-dim shapes.
  if (n == 0) {
    b = Mat(0, static_cast<int>(d.cols()));
    c = Mat(static_cast<int>(d.rows()), 0);
  }
  return StateSpaceSystem(a, b, c, d);
}

ChannelModel channel_from_json(const Json& j) {
  if (!j.contains("kind") && j.contains("A") && j.contains("D")) {
    // Bare state-space object {A, B, C, D} for the inverse filter.
    return make_channel(system_from_json(j));
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "rational") {
    const Vec num = vector_from_json(j.at("num"));
    const Vec den = vector_from_json(j.at("den"));
    return make_channel(rational_system(num, den));
  }
  if (kind == "statespace") {
    const Mat f = matrix_from_json(j.at("F"));
    const int m = static_cast<int>(f.rows());
    Mat g(m, 1);
    const Vec gv = vector_from_json(j.at("G"));
    if (gv.size() != m) throw ValidationError("channel JSON: G must have length m");
    g.col(0) = gv;
    Mat h(1, m);
    const Vec hv = vector_from_json(j.at("H"));
    if (hv.size() != m) throw ValidationError("channel JSON: H must have length m");
    h.row(0) = hv.transpose();
    const double d = j.value("D", 1.0);
    return make_channel(StateSpaceSystem(f, g, h, Mat::Constant(1, 1, d)));
  }
  throw ValidationError("channel JSON: unknown kind '" + kind + "'");
}

ChannelModel load_channel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open channel file: " + path.string());
  Json j;
  in >> j;
  return channel_from_json(j);
}

Json channel_to_json(const ChannelModel& ch) {
  Json j;
  j["kind"] = "statespace";
  j["F"] = matrix_to_json(ch.F());
  Json g = Json::array(), h = Json::array();
  for (int i = 0; i < ch.order(); ++i) {
    g.push_back(ch.G()(i));
    h.push_back(ch.H()(i));
  }
  j["G"] = g;
  j["H"] = h;
  j["D"] = 1.0;
  return j;
}

Json design_to_json(const EncoderDesign& d, const OptimizerReport* report) {
  Json j;
  j["n_star"] = d.n_star;
  j["A_star"] = matrix_to_json(d.A_star);
  j["C_star"] = vector_to_json(d.C_star.transpose());
  j["L1"] = vector_to_json(d.L1);
  j["L2"] = vector_to_json(d.L2);
  j["sigma_star"] = matrix_to_json(d.sigma_star);
  j["sigma_x_star"] = matrix_to_json(d.sigma_x_star);
  j["rate"] = d.rate;
  j["power"] = d.power;
  j["ke"] = d.ke;
  j["channel"] = channel_to_json(d.channel);
  if (report) {
    j["optimizer"] = Json{{"best_plus", report->plus.best},
                          {"best_minus", report->minus.best},
                          {"restarts", report->restarts},
                          {"total_evals", report->total_evals},
                          {"pass1_n", report->pass1_n},
                          {"chosen_branch", std::string(1, report->chosen_branch)},
                          {"converged_plus", report->plus.converged},
                          {"converged_minus", report->minus.converged}};
  }
  return j;
}

EncoderDesign design_from_json(const Json& j) {
  EncoderDesign d;
  d.n_star = j.at("n_star").get<int>();
  d.A_star = matrix_from_json(j.at("A_star"));
  const Vec c = vector_from_json(j.at("C_star"));
  d.C_star = c.transpose();
  d.L1 = vector_from_json(j.at("L1"));
  d.L2 = vector_from_json(j.at("L2"));
  d.sigma_star = matrix_from_json(j.at("sigma_star"));
  d.sigma_x_star = matrix_from_json(j.at("sigma_x_star"));
  d.rate = j.at("rate").get<double>();
  d.power = j.at("power").get<double>();
  d.ke = j.at("ke").get<double>();
  d.channel = channel_from_json(j.at("channel"));
  return d;
}

void save_design(const EncoderDesign& d, const OptimizerReport* report,
                 const std::filesystem::path& path) {
  auto out = open_out(path);
  out << design_to_json(d, report).dump(2) << "\n";
}

EncoderDesign load_design(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open design file: " + path.string());
  Json j;
  in >> j;
  return design_from_json(j);
}

Json codebook_summary(const Codebook& book) {
  Json j;
  j["T"] = book.T;
  j["epsilon"] = book.epsilon;
  j["M_T"] = book.message_count;
  j["rate_actual"] =
      std::log2(static_cast<double>(book.message_count)) / (book.T + 1);
  j["sigmas"] = vector_to_json(book.sigmas);
  Json segs = Json::array();
  for (const auto s : book.segments) segs.push_back(s);
  j["segments_per_side"] = segs;
  return j;
}

void export_trace(const TransmissionTrace& trace, const std::filesystem::path& path) {
  auto out = open_out(path);
  const int n1 = static_cast<int>(trace.x_hat_0.cols());
  out << "t,u,y,power_avg";
  for (int i = 0; i < n1; ++i) out << ",xhat0_" << i;
  out << "\n";
  for (int t = 0; t < trace.u.size(); ++t) {
    out << t << "," << trace.u(t) << "," << trace.y(t) << ","
        << trace.power_running_avg(t);
    for (int i = 0; i < n1; ++i) out << "," << trace.x_hat_0(t, i);
    out << "\n";
  }
}

void export_sim_result(const SimResult& res, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  if (res.mode == SimMode::kDigital) {
    auto out = open_out(dir / "pe_curve.csv");
    out << "T,pe_emp,pe_emp_sigma,pe_theory\n";
    for (const HorizonStat& st : res.pe_by_horizon) {
      out << st.horizon << "," << st.pe << "," << st.sigma << "," << st.pe_theory
          << "\n";
    }
  } else {
    auto out = open_out(dir / "mse.csv");
    out << "t,det_mse_emp,det_mse_theory,det_mse_kf,trace_mse_emp,"
           "trace_mse_theory,trace_mse_kf\n";
    for (std::size_t c = 0; c < res.mse_checkpoints.size(); ++c) {
      out << res.mse_checkpoints[c] << "," << res.mse_empirical[c].determinant()
          << "," << res.mse_theory[c].determinant() << ","
          << res.mse_theory_kf[c].determinant() << ","
          << res.mse_empirical[c].trace() << "," << res.mse_theory[c].trace()
          << "," << res.mse_theory_kf[c].trace() << "\n";
    }
  }

  {
    auto out = open_out(dir / "power_trace.csv");
    out << "t,power_avg\n";
    for (int t = 0; t < res.avg_power_trace.size(); ++t) {
      out << t << "," << res.avg_power_trace(t) << "\n";
    }
  }

  Json j;
  j["mode"] = res.mode == SimMode::kDigital ? "digital" : "analog";
  j["trials"] = res.trials;
  j["T"] = res.T;
  j["epsilon"] = res.epsilon;
  j["seed"] = res.seed;
  if (!res.pe_by_horizon.empty()) {
    const HorizonStat& last = res.pe_by_horizon.back();
    j["final_pe"] = last.pe;
    j["final_pe_theory"] = last.pe_theory;
  }
  if (res.avg_power_trace.size() > 0) {
    j["final_power_avg"] = res.avg_power_trace(res.avg_power_trace.size() - 1);
  }
  auto out = open_out(dir / "summary.json");
  out << j.dump(2) << "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

}  // namespace feedcap
