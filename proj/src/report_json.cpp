#include "lensless/report_json.hpp"

namespace lensless {

nlohmann::json to_json(const MetricReport& report) {
    nlohmann::json j;
    j["mse"] = report.mse;
    j["psnr_db"] = report.psnr_db ? nlohmann::json(*report.psnr_db) : nlohmann::json(nullptr);
    j["ssim"] = report.ssim;
    for (const auto& [key, value] : report.extra) j[key] = value;
    return j;
}

nlohmann::json to_json(const PsfReport& report) {
    nlohmann::json channels = nlohmann::json::array();
    for (const auto& c : report.channels) {
        nlohmann::json j;
        j["autocorr_peak"] = c.autocorr_peak;
        j["max_sidelobe"] = c.max_sidelobe;
        j["sidelobe_lag"] = {c.sidelobe_row_lag, c.sidelobe_col_lag};
        j["peak_to_sidelobe"] = c.peak_to_sidelobe ? nlohmann::json(*c.peak_to_sidelobe) : nlohmann::json(nullptr);
        j["sidelobe_to_peak"] = c.sidelobe_to_peak;
        j["conditioning"] = c.conditioning;
        j["support_pixels"] = c.support_pixels;
        j["support_fraction"] = c.support_fraction;
        channels.push_back(std::move(j));
    }
    return {{"height", report.height}, {"width", report.width}, {"channels", std::move(channels)}};
}

nlohmann::json to_json(const FileResult& result, bool with_timing) {
    nlohmann::json j;
    j["name"] = result.name;
    if (result.report) {
        j.update(to_json(*result.report));
    } else {
        j["error"] = result.error;
    }
    if (with_timing) j["seconds"] = result.seconds;
    return j;
}

}  // namespace lensless
