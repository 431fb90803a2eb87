#include "retarget/eval/scorers.hpp"

#include "retarget/core/error.hpp"

namespace retarget::eval {

double sharpness_score(const Tensor& image) {
    if (image.rank() != 3 || image.dim(0) != 3)
        throw ModuleError("evaluation", "sharpness scorer expects a [3,H,W] image");
    const int h = image.dim(1), w = image.dim(2);
    if (h < 3 || w < 3) return 0.0;
    // Laplacian of the luma, interior pixels only.
    std::vector<double> lap;
    lap.reserve(static_cast<size_t>(h - 2) * (w - 2));
    auto luma = [&](int y, int x) {
        return 0.299 * image.at(0, y, x) + 0.587 * image.at(1, y, x) + 0.114 * image.at(2, y, x);
    };
    for (int y = 1; y < h - 1; ++y)
        for (int x = 1; x < w - 1; ++x)
            lap.push_back(luma(y - 1, x) + luma(y + 1, x) + luma(y, x - 1) + luma(y, x + 1) -
                          4.0 * luma(y, x));
    double mean = 0.0;
    for (double v : lap) mean += v;
    mean /= static_cast<double>(lap.size());
    double var = 0.0;
    for (double v : lap) var += (v - mean) * (v - mean);
    return var / static_cast<double>(lap.size());
}

ScorerRegistry::ScorerRegistry() {
    register_scorer("sharpness", Scorer{"1", sharpness_score});
}

void ScorerRegistry::register_scorer(const std::string& id, Scorer scorer) {
    scorers_[id] = std::move(scorer);
}

ScoreRecord ScorerRegistry::score(const Tensor& image, const std::string& id) const {
    const auto it = scorers_.find(id);
    if (it == scorers_.end()) {
        std::string avail;
        for (const auto& s : available()) avail += (avail.empty() ? "" : ", ") + s;
        throw ModuleError("evaluation", "unknown scorer '" + id + "' (available: " + avail + ")");
    }
    return ScoreRecord{it->second.fn(image), id, it->second.version};
}

std::vector<std::string> ScorerRegistry::available() const {
    std::vector<std::string> out;
    out.reserve(scorers_.size());
    for (const auto& [id, _] : scorers_) out.push_back(id);
    return out;
}

}  // namespace retarget::eval
