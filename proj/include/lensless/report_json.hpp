#pragma once

#include "json.hpp"

#include "lensless/autocorr.hpp"
#include "lensless/dataset.hpp"
#include "lensless/metrics.hpp"

namespace lensless {

/// {"mse": ..., "psnr_db": ... | null, "ssim": ..., <extra keys>}
nlohmann::json to_json(const MetricReport& report);
nlohmann::json to_json(const PsfReport& report);
/// One JSON Lines record; "seconds" is omitted when with_timing is false.
nlohmann::json to_json(const FileResult& result, bool with_timing);

}  // namespace lensless
