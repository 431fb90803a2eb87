#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "retarget/core/tensor.hpp"

namespace retarget::eval {

using retarget::Tensor;

struct ScoreRecord {
    double score = 0.0;
    std::string scorer_id;
    std::string scorer_version;
};

// No-reference quality scorers are plug-ins; external pretrained IQA models
// register here. The built-in "sharpness" scorer (variance of the Laplacian)
// keeps the harness runnable without any downloads.
class ScorerRegistry {
public:
    struct Scorer {
        std::string version;
        std::function<double(const Tensor&)> fn;
    };

    ScorerRegistry();  // registers the built-ins

    void register_scorer(const std::string& id, Scorer scorer);
    ScoreRecord score(const Tensor& image, const std::string& id) const;
    std::vector<std::string> available() const;

private:
    std::map<std::string, Scorer> scorers_;
};

double sharpness_score(const Tensor& image);  // variance of the Laplacian

}  // namespace retarget::eval
