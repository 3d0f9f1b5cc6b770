#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "groundnav/types.hpp"

namespace groundnav {

enum class AggregationMode { Average, Attention };

/// Weights for one pre-normalization transformer encoder layer plus the
/// fusion scorer that turns transformed view features into softmax weights.
struct EncoderParams {
    int d = 32;
    int heads = 1;
    Eigen::MatrixXd wq, wk, wv, wo;          // d x d
    Eigen::MatrixXd ff_w1;                   // d x 4d
    Eigen::VectorXd ff_b1;                   // 4d
    Eigen::MatrixXd ff_w2;                   // 4d x d
    Eigen::VectorXd ff_b2;                   // d
    Eigen::VectorXd norm1_gain, norm1_bias;  // d
    Eigen::VectorXd norm2_gain, norm2_bias;  // d
    Eigen::VectorXd fusion_w;                // d
    double fusion_b = 0.0;

    void validate() const;

    /// All-zero weights, unit normalization gains: encoder_forward becomes
    /// the identity and fusion weights become uniform.
    static EncoderParams zeros(int d, int heads = 1);

    /// Gaussian init scaled by 1/sqrt(d) from a deterministic stream.
    static EncoderParams seeded(int d, int heads, std::uint64_t seed);
};

/// ViewBatch rows are views, columns are feature dimensions.
using ViewBatch = Eigen::MatrixXd;

/// X1 = V + MultiHeadSelfAttention(norm1(V)); out = X1 + FeedForward(norm2(X1)).
/// Row normalization uses population variance with a 1e-5 floor. No positional
/// encoding, so the op is permutation-equivariant in the rows.
ViewBatch encoder_forward(const ViewBatch& v, const EncoderParams& p);

/// softmax over per-row fusion scores w . v'_i + b, max-subtracted.
Eigen::VectorXd attention_weights(const ViewBatch& v_prime, const EncoderParams& p);

/// Average: arithmetic mean of the raw views. Attention: encoder_forward,
/// then the attention-weighted sum of the transformed rows.
FeatureVec aggregate_views(const std::vector<FeatureVec>& views, AggregationMode mode,
                           const EncoderParams& p);

void save_params(const EncoderParams& p, const std::filesystem::path& path);
EncoderParams load_params(const std::filesystem::path& path);

}  // namespace groundnav
