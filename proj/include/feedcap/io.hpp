#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "feedcap/capacity.hpp"
#include "feedcap/coding.hpp"
#include "feedcap/sim.hpp"

namespace feedcap {

using Json = nlohmann::json;

// State-space systems serialize as {"A": [[...]], "B": [[...]], ...} with
// row-major nested arrays.
Json system_to_json(const StateSpaceSystem& sys);
StateSpaceSystem system_from_json(const Json& j);

// Channel files: {"kind":"rational","num":[...],"den":[...]} or
// {"kind":"statespace","F":[[...]],"G":[...],"H":[...],"D":1.0}.
ChannelModel channel_from_json(const Json& j);
ChannelModel load_channel(const std::filesystem::path& path);
Json channel_to_json(const ChannelModel& ch);

Json design_to_json(const EncoderDesign& d, const OptimizerReport* report = nullptr);
EncoderDesign design_from_json(const Json& j);
void save_design(const EncoderDesign& d, const OptimizerReport* report,
                 const std::filesystem::path& path);
EncoderDesign load_design(const std::filesystem::path& path);

Json codebook_summary(const Codebook& book);

void export_trace(const TransmissionTrace& trace, const std::filesystem::path& path);

// Writes pe_curve.csv / power_trace.csv / mse.csv (analog) plus summary.json
// under the given directory.
void export_sim_result(const SimResult& res, const std::filesystem::path& dir);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace feedcap
