#include "groundnav/encoder.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "groundnav/rng.hpp"

namespace groundnav {

namespace {

void check_finite(const Eigen::MatrixXd& m, const char* name) {
    if (!m.allFinite()) {
        throw std::invalid_argument(std::string("encoder params: ") + name + " has non-finite values");
    }
}

Eigen::MatrixXd layer_norm(const Eigen::MatrixXd& x, const Eigen::VectorXd& gain,
                           const Eigen::VectorXd& bias) {
    Eigen::MatrixXd out(x.rows(), x.cols());
    const double inv_d = 1.0 / x.cols();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        double mean = x.row(i).mean();
        double var = (x.row(i).array() - mean).square().sum() * inv_d;
        double scale = 1.0 / std::sqrt(std::max(var, 1e-5));
        out.row(i) = ((x.row(i).array() - mean) * scale).transpose().array() * gain.array() +
                     bias.array();
    }
    return out;
}

void softmax_rows_inplace(Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        double mx = m.row(i).maxCoeff();
        m.row(i) = (m.row(i).array() - mx).exp();
        m.row(i) /= m.row(i).sum();
    }
}

}  // namespace

void EncoderParams::validate() const {
    if (d <= 0) throw std::invalid_argument("encoder params: d must be positive");
    if (heads <= 0 || d % heads != 0) {
        throw std::invalid_argument("encoder params: d must be divisible by heads");
    }
    auto check_shape = [&](const Eigen::MatrixXd& m, int rows, int cols, const char* name) {
        if (m.rows() != rows || m.cols() != cols) {
            throw std::invalid_argument(std::string("encoder params: bad shape for ") + name);
        }
        check_finite(m, name);
    };
    check_shape(wq, d, d, "wq");
    check_shape(wk, d, d, "wk");
    check_shape(wv, d, d, "wv");
    check_shape(wo, d, d, "wo");
    check_shape(ff_w1, d, 4 * d, "ff_w1");
    check_shape(ff_b1, 4 * d, 1, "ff_b1");
    check_shape(ff_w2, 4 * d, d, "ff_w2");
    check_shape(ff_b2, d, 1, "ff_b2");
    check_shape(norm1_gain, d, 1, "norm1_gain");
    check_shape(norm1_bias, d, 1, "norm1_bias");
    check_shape(norm2_gain, d, 1, "norm2_gain");
    check_shape(norm2_bias, d, 1, "norm2_bias");
    check_shape(fusion_w, d, 1, "fusion_w");
    if (!std::isfinite(fusion_b)) {
        throw std::invalid_argument("encoder params: fusion_b is not finite");
    }
}

EncoderParams EncoderParams::zeros(int d, int heads) {
    EncoderParams p;
    p.d = d;
    p.heads = heads;
    p.wq = p.wk = p.wv = p.wo = Eigen::MatrixXd::Zero(d, d);
    p.ff_w1 = Eigen::MatrixXd::Zero(d, 4 * d);
    p.ff_b1 = Eigen::VectorXd::Zero(4 * d);
    p.ff_w2 = Eigen::MatrixXd::Zero(4 * d, d);
    p.ff_b2 = Eigen::VectorXd::Zero(d);
    p.norm1_gain = Eigen::VectorXd::Ones(d);
    p.norm1_bias = Eigen::VectorXd::Zero(d);
    p.norm2_gain = Eigen::VectorXd::Ones(d);
    p.norm2_bias = Eigen::VectorXd::Zero(d);
    p.fusion_w = Eigen::VectorXd::Zero(d);
    p.fusion_b = 0.0;
    p.validate();
    return p;
}

EncoderParams EncoderParams::seeded(int d, int heads, std::uint64_t seed) {
    EncoderParams p = zeros(d, heads);
    SplitRng rng(seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    auto fill = [&](Eigen::MatrixXd& m) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                m(i, j) = rng.gaussian() * scale;
            }
        }
    };
    fill(p.wq);
    fill(p.wk);
    fill(p.wv);
    fill(p.wo);
    fill(p.ff_w1);
    fill(p.ff_w2);
    for (Eigen::Index i = 0; i < d; ++i) p.fusion_w(i) = rng.gaussian() * scale;
    p.validate();
    return p;
}

ViewBatch encoder_forward(const ViewBatch& v, const EncoderParams& p) {
    p.validate();
    if (v.cols() != p.d) {
        throw std::invalid_argument("encoder_forward: input width does not match d");
    }
    if (v.rows() < 1) {
        throw std::invalid_argument("encoder_forward: need at least one view");
    }

    const Eigen::Index n = v.rows();
    const int dh = p.d / p.heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

    Eigen::MatrixXd n1 = layer_norm(v, p.norm1_gain, p.norm1_bias);
    Eigen::MatrixXd q = n1 * p.wq;
    Eigen::MatrixXd k = n1 * p.wk;
    Eigen::MatrixXd val = n1 * p.wv;

    Eigen::MatrixXd concat(n, p.d);
    for (int h = 0; h < p.heads; ++h) {
        auto qh = q.middleCols(h * dh, dh);
        auto kh = k.middleCols(h * dh, dh);
        auto vh = val.middleCols(h * dh, dh);
        Eigen::MatrixXd scores = qh * kh.transpose() * scale;
        softmax_rows_inplace(scores);
        concat.middleCols(h * dh, dh) = scores * vh;
    }

    Eigen::MatrixXd x1 = v + concat * p.wo;
    Eigen::MatrixXd n2 = layer_norm(x1, p.norm2_gain, p.norm2_bias);
    Eigen::MatrixXd hidden =
        ((n2 * p.ff_w1).rowwise() + p.ff_b1.transpose()).cwiseMax(0.0);
    return x1 + ((hidden * p.ff_w2).rowwise() + p.ff_b2.transpose());
}

Eigen::VectorXd attention_weights(const ViewBatch& v_prime, const EncoderParams& p) {
    if (v_prime.cols() != p.d) {
        throw std::invalid_argument("attention_weights: input width does not match d");
    }
    Eigen::VectorXd scores = v_prime * p.fusion_w;
    scores.array() += p.fusion_b;
    double mx = scores.maxCoeff();
    Eigen::VectorXd w = (scores.array() - mx).exp();
    return w / w.sum();
}

FeatureVec aggregate_views(const std::vector<FeatureVec>& views, AggregationMode mode,
                           const EncoderParams& p) {
    if (views.empty()) {
        throw std::invalid_argument("aggregate_views: no views");
    }
    if (mode == AggregationMode::Average) {
        FeatureVec sum = FeatureVec::Zero(views.front().size());
        for (const auto& f : views) sum += f;
        return sum / static_cast<double>(views.size());
    }
    ViewBatch v(views.size(), views.front().size());
    for (size_t i = 0; i < views.size(); ++i) v.row(i) = views[i].transpose();
    ViewBatch v_prime = encoder_forward(v, p);
    Eigen::VectorXd w = attention_weights(v_prime, p);
    return v_prime.transpose() * w;
}

namespace {

constexpr char kMagic[4] = {'G', 'V', 'A', 'G'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f32(std::string& buf, double v) {
    put_u32(buf, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

std::uint32_t get_u32(const std::string& buf, size_t& pos) {
    if (pos + 4 > buf.size()) throw std::runtime_error("parameter file truncated");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    }
    pos += 4;
    return v;
}

double get_f32(const std::string& buf, size_t& pos) {
    return static_cast<double>(std::bit_cast<float>(get_u32(buf, pos)));
}

void put_matrix(std::string& buf, const Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            put_f32(buf, m(i, j));
        }
    }
}

void get_matrix(const std::string& buf, size_t& pos, Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            m(i, j) = get_f32(buf, pos);
        }
    }
}

}  // namespace

void save_params(const EncoderParams& p, const std::filesystem::path& path) {
    p.validate();
    std::string buf;
    buf.append(kMagic, 4);
    put_u32(buf, kVersion);
    put_u32(buf, static_cast<std::uint32_t>(p.d));
    put_u32(buf, static_cast<std::uint32_t>(p.heads));
    put_matrix(buf, p.wq);
    put_matrix(buf, p.wk);
    put_matrix(buf, p.wv);
    put_matrix(buf, p.wo);
    put_matrix(buf, p.ff_w1);
    put_matrix(buf, p.ff_b1);
    put_matrix(buf, p.ff_w2);
    put_matrix(buf, p.ff_b2);
    put_matrix(buf, p.norm1_gain);
    put_matrix(buf, p.norm1_bias);
    put_matrix(buf, p.norm2_gain);
    put_matrix(buf, p.norm2_bias);
    put_matrix(buf, p.fusion_w);
    put_f32(buf, p.fusion_b);

    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write parameter file: " + path.string());
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) {
        throw std::runtime_error("write failed for parameter file: " + path.string());
    }
}

EncoderParams load_params(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open parameter file: " + path.string());
    }
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < 16 || std::memcmp(buf.data(), kMagic, 4) != 0) {
        throw std::runtime_error(path.string() + ": not a parameter file (bad magic)");
    }
    size_t pos = 4;
    std::uint32_t version = get_u32(buf, pos);
    if (version != kVersion) {
        throw std::runtime_error(path.string() + ": unsupported parameter file version " +
                                 std::to_string(version));
    }
    int d = static_cast<int>(get_u32(buf, pos));
    int heads = static_cast<int>(get_u32(buf, pos));
    if (d <= 0 || d > 1 << 16 || heads <= 0 || d % heads != 0) {
        throw std::runtime_error(path.string() + ": invalid dimensions in header");
    }
    EncoderParams p = EncoderParams::zeros(d, heads);
    auto get_vector = [&](Eigen::VectorXd& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = get_f32(buf, pos);
    };
    get_matrix(buf, pos, p.wq);
    get_matrix(buf, pos, p.wk);
    get_matrix(buf, pos, p.wv);
    get_matrix(buf, pos, p.wo);
    get_matrix(buf, pos, p.ff_w1);
    get_vector(p.ff_b1);
    get_matrix(buf, pos, p.ff_w2);
    get_vector(p.ff_b2);
    get_vector(p.norm1_gain);
    get_vector(p.norm1_bias);
    get_vector(p.norm2_gain);
    get_vector(p.norm2_bias);
    get_vector(p.fusion_w);
    p.fusion_b = get_f32(buf, pos);
    if (pos != buf.size()) {
        throw std::runtime_error(path.string() + ": trailing bytes in parameter file");
    }
    p.validate();
    return p;
}

}  // namespace groundnav
