#include "econet/minilm.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace econet {

namespace {

constexpr double kLnEps = 1e-12;

// Row-wise layer norm; writes the normalized (pre-gain) matrix and the
// per-row inverse standard deviation for the backward pass.
MatrixXd layer_norm(const MatrixXd& x, const VectorXd& gain, const VectorXd& bias, MatrixXd& norm_x,
                    VectorXd& inv_std) {
  const auto n = x.rows();
  const auto d = x.cols();
  norm_x.resize(n, d);
  inv_std.resize(n);
  MatrixXd out(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    double mean = x.row(i).mean();
    double var = (x.row(i).array() - mean).square().sum() / double(d);
    double is = 1.0 / std::sqrt(var + kLnEps);
    inv_std(i) = is;
    norm_x.row(i) = (x.row(i).array() - mean) * is;
    out.row(i) = norm_x.row(i).array() * gain.transpose().array() + bias.transpose().array();
  }
  return out;
}

// d(loss)/dx for y = gain .* norm(x) + bias.
MatrixXd layer_norm_backward(const MatrixXd& d_out, const MatrixXd& norm_x, const VectorXd& inv_std,
                             const VectorXd& gain, VectorXd& d_gain, VectorXd& d_bias) {
  const auto n = d_out.rows();
  const auto d = d_out.cols();
  MatrixXd dx(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::RowVectorXd dy = d_out.row(i).array() * gain.transpose().array();
    double m1 = dy.mean();
    double m2 = (dy.array() * norm_x.row(i).array()).mean();
    dx.row(i) = (dy.array() - m1 - norm_x.row(i).array() * m2) * inv_std(i);
  }
  d_gain.noalias() += (d_out.array() * norm_x.array()).colwise().sum().matrix().transpose();
  d_bias.noalias() += d_out.colwise().sum().transpose();
  return dx;
}

MatrixXd softmax_rows(const MatrixXd& scores) {
  MatrixXd out(scores.rows(), scores.cols());
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    double mx = scores.row(i).maxCoeff();
    Eigen::ArrayXd e = (scores.row(i).array() - mx).exp();
    out.row(i) = (e / e.sum()).matrix();
  }
  return out;
}

// Inverted dropout scale mask: entries are 0 or 1/(1-p).
MatrixXd dropout_mask(Eigen::Index rows, Eigen::Index cols, double p, std::mt19937_64& rng) {
  MatrixXd mask(rows, cols);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double keep_scale = 1.0 / (1.0 - p);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) mask(i, j) = unit(rng) < p ? 0.0 : keep_scale;
  return mask;
}

}  // namespace

void ModelConfig::validate() const {
  if (n_layers < 1) throw std::invalid_argument("n_layers must be >= 1");
  if (n_heads < 1) throw std::invalid_argument("n_heads must be >= 1");
  if (hidden_dim < 1 || ffn_dim < 1 || vocab_size < 1 || max_seq_len < 1)
    throw std::invalid_argument("model dimensions must be positive");
  if (hidden_dim % n_heads != 0) throw std::invalid_argument("hidden_dim must be divisible by n_heads");
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) throw std::invalid_argument("dropout_rate must be in [0,1)");
}

MiniLmParameters MiniLmParameters::zeros(const ModelConfig& config) {
  config.validate();
  MiniLmParameters p;
  p.config = config;
  const int d = config.hidden_dim, f = config.ffn_dim;
  p.token_embedding = MatrixXd::Zero(config.vocab_size, d);
  p.position_embedding = MatrixXd::Zero(config.max_seq_len, d);
  p.ln_emb_gain = VectorXd::Zero(d);
  p.ln_emb_bias = VectorXd::Zero(d);
  p.layers.resize(config.n_layers);
  for (auto& layer : p.layers) {
    layer.wq = MatrixXd::Zero(d, d);
    layer.wk = MatrixXd::Zero(d, d);
    layer.wv = MatrixXd::Zero(d, d);
    layer.wo = MatrixXd::Zero(d, d);
    layer.bq = VectorXd::Zero(d);
    layer.bk = VectorXd::Zero(d);
    layer.bv = VectorXd::Zero(d);
    layer.bo = VectorXd::Zero(d);
    layer.ln1_gain = VectorXd::Zero(d);
    layer.ln1_bias = VectorXd::Zero(d);
    layer.w_ffn1 = MatrixXd::Zero(d, f);
    layer.b_ffn1 = VectorXd::Zero(f);
    layer.w_ffn2 = MatrixXd::Zero(f, d);
    layer.b_ffn2 = VectorXd::Zero(d);
    layer.ln2_gain = VectorXd::Zero(d);
    layer.ln2_bias = VectorXd::Zero(d);
  }
  return p;
}

MiniLmParameters MiniLmParameters::init(const ModelConfig& config, uint64_t seed) {
  MiniLmParameters p = zeros(config);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 0.02);
  visit_tensors(p, [&](const std::string& name, auto& tensor) {
    bool is_gain = name.find("gain") != std::string::npos;
    bool is_bias = name.find("bias") != std::string::npos || name.find(".b") != std::string::npos;
    double* data = tensor.data();
    for (Eigen::Index i = 0; i < tensor.size(); ++i) {
      if (is_gain)
        data[i] = 1.0;
      else if (is_bias)
        data[i] = 0.0;
      else
        data[i] = normal(rng);
    }
  });
  return p;
}

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))); }

double gelu_derivative(double x) {
  const double phi = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
  return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))) + x * phi;
}

ForwardTrace forward(const MiniLmParameters& params, std::span<const int> token_ids, bool train_mode,
                     uint64_t rng_seed, ForwardCache* cache) {
  const ModelConfig& cfg = params.config;
  const int n = static_cast<int>(token_ids.size());
  if (n == 0) throw std::invalid_argument("forward: empty input");
  if (n > cfg.max_seq_len)
    throw std::invalid_argument("forward: input length " + std::to_string(n) + " exceeds max_seq_len " +
                                std::to_string(cfg.max_seq_len));
  for (int id : token_ids)
    if (id < 0 || id >= cfg.vocab_size)
      throw std::out_of_range("forward: token id " + std::to_string(id) + " outside vocabulary of size " +
                              std::to_string(cfg.vocab_size));

  const int d = cfg.hidden_dim, H = cfg.n_heads, dh = cfg.head_dim();
  const double p_drop = train_mode ? cfg.dropout_rate : 0.0;
  std::mt19937_64 rng(rng_seed);

  ForwardCache local_cache;
  ForwardCache& c = cache ? *cache : local_cache;
  c.token_ids.assign(token_ids.begin(), token_ids.end());
  c.train_mode = train_mode;
  c.layers.assign(cfg.n_layers, {});

  ForwardTrace trace;
  trace.hidden_states.reserve(cfg.n_layers + 1);
  trace.attention.assign(cfg.n_layers, {});

  MatrixXd emb(n, d);
  for (int i = 0; i < n; ++i)
    emb.row(i) = params.token_embedding.row(token_ids[i]) + params.position_embedding.row(i);
  c.emb_sum = emb;
  MatrixXd x = layer_norm(emb, params.ln_emb_gain, params.ln_emb_bias, c.emb_norm_x, c.emb_inv_std);
  if (p_drop > 0.0) {
    c.emb_dropout = dropout_mask(n, d, p_drop, rng);
    x.array() *= c.emb_dropout.array();
  } else {
    c.emb_dropout.resize(0, 0);
  }
  trace.hidden_states.push_back(x);

  for (int l = 0; l < cfg.n_layers; ++l) {
    const LayerParams& w = params.layers[l];
    ForwardCache::Layer& cl = c.layers[l];
    cl.x_in = x;
    cl.q = (x * w.wq).rowwise() + w.bq.transpose();
    cl.k = (x * w.wk).rowwise() + w.bk.transpose();
    cl.v = (x * w.wv).rowwise() + w.bv.transpose();
    cl.attn.resize(H);
    cl.attn_dropout.assign(H, MatrixXd());
    cl.ctx.resize(n, d);
    trace.attention[l].resize(H);
    const double scale = 1.0 / std::sqrt(double(dh));
    for (int h = 0; h < H; ++h) {
      auto qh = cl.q.middleCols(h * dh, dh);
      auto kh = cl.k.middleCols(h * dh, dh);
      auto vh = cl.v.middleCols(h * dh, dh);
      MatrixXd scores = qh * kh.transpose() * scale;
      cl.attn[h] = softmax_rows(scores);
      trace.attention[l][h] = cl.attn[h];
      MatrixXd attn_used = cl.attn[h];
      if (p_drop > 0.0) {
        cl.attn_dropout[h] = dropout_mask(n, n, p_drop, rng);
        attn_used.array() *= cl.attn_dropout[h].array();
      }
      cl.ctx.middleCols(h * dh, dh).noalias() = attn_used * vh;
    }
    MatrixXd attn_out = (cl.ctx * w.wo).rowwise() + w.bo.transpose();
    if (p_drop > 0.0) {
      cl.attn_out_dropout = dropout_mask(n, d, p_drop, rng);
      attn_out.array() *= cl.attn_out_dropout.array();
    }
    cl.r1 = cl.x_in + attn_out;
    cl.x_mid = layer_norm(cl.r1, w.ln1_gain, w.ln1_bias, cl.ln1_x, cl.ln1_inv_std);
    cl.ffn_pre = (cl.x_mid * w.w_ffn1).rowwise() + w.b_ffn1.transpose();
    cl.ffn_act = cl.ffn_pre.unaryExpr([](double v) { return gelu(v); });
    MatrixXd ffn_out = (cl.ffn_act * w.w_ffn2).rowwise() + w.b_ffn2.transpose();
    if (p_drop > 0.0) {
      cl.ffn_dropout = dropout_mask(n, d, p_drop, rng);
      ffn_out.array() *= cl.ffn_dropout.array();
    }
    cl.r2 = cl.x_mid + ffn_out;
    x = layer_norm(cl.r2, w.ln2_gain, w.ln2_bias, cl.ln2_x, cl.ln2_inv_std);
    trace.hidden_states.push_back(x);
  }
  return trace;
}

void backward(const MiniLmParameters& params, const ForwardCache& cache, const MatrixXd& d_final,
              MiniLmParameters& grads) {
  const ModelConfig& cfg = params.config;
  const int n = static_cast<int>(cache.token_ids.size());
  const int d = cfg.hidden_dim, H = cfg.n_heads, dh = cfg.head_dim();
  if (d_final.rows() != n || d_final.cols() != d) throw std::invalid_argument("backward: d_final shape mismatch");

  MatrixXd dx = d_final;
  for (int l = cfg.n_layers - 1; l >= 0; --l) {
    const LayerParams& w = params.layers[l];
    LayerParams& g = grads.layers[l];
    const ForwardCache::Layer& cl = cache.layers[l];

    // ln2
    MatrixXd d_r2 = layer_norm_backward(dx, cl.ln2_x, cl.ln2_inv_std, w.ln2_gain, g.ln2_gain, g.ln2_bias);
    // residual: r2 = x_mid + dropout(ffn_out)
    MatrixXd d_ffn_out = d_r2;
    if (cl.ffn_dropout.size() > 0) d_ffn_out.array() *= cl.ffn_dropout.array();
    MatrixXd d_x_mid = d_r2;

    // ffn second linear
    g.w_ffn2.noalias() += cl.ffn_act.transpose() * d_ffn_out;
    g.b_ffn2.noalias() += d_ffn_out.colwise().sum().transpose();
    MatrixXd d_act = d_ffn_out * w.w_ffn2.transpose();
    MatrixXd d_pre = d_act.array() * cl.ffn_pre.unaryExpr([](double v) { return gelu_derivative(v); }).array();
    g.w_ffn1.noalias() += cl.x_mid.transpose() * d_pre;
    g.b_ffn1.noalias() += d_pre.colwise().sum().transpose();
    d_x_mid.noalias() += d_pre * w.w_ffn1.transpose();

    // ln1
    MatrixXd d_r1 = layer_norm_backward(d_x_mid, cl.ln1_x, cl.ln1_inv_std, w.ln1_gain, g.ln1_gain, g.ln1_bias);
    // residual: r1 = x_in + dropout(attn_out)
    MatrixXd d_attn_out = d_r1;
    if (cl.attn_out_dropout.size() > 0) d_attn_out.array() *= cl.attn_out_dropout.array();
    MatrixXd d_x_in = d_r1;

    // output projection
    g.wo.noalias() += cl.ctx.transpose() * d_attn_out;
    g.bo.noalias() += d_attn_out.colwise().sum().transpose();
    MatrixXd d_ctx = d_attn_out * w.wo.transpose();

    // attention heads
    MatrixXd dq(n, d), dk(n, d), dv(n, d);
    const double scale = 1.0 / std::sqrt(double(dh));
    for (int h = 0; h < H; ++h) {
      auto qh = cl.q.middleCols(h * dh, dh);
      auto kh = cl.k.middleCols(h * dh, dh);
      auto vh = cl.v.middleCols(h * dh, dh);
      auto d_ctx_h = d_ctx.middleCols(h * dh, dh);
      MatrixXd attn_used = cl.attn[h];
      if (cl.attn_dropout[h].size() > 0) attn_used.array() *= cl.attn_dropout[h].array();
      MatrixXd d_attn_used = d_ctx_h * vh.transpose();
      dv.middleCols(h * dh, dh).noalias() = attn_used.transpose() * d_ctx_h;
      MatrixXd d_attn = d_attn_used;
      if (cl.attn_dropout[h].size() > 0) d_attn.array() *= cl.attn_dropout[h].array();
      // softmax backward, row-wise
      MatrixXd d_scores(n, n);
      for (int i = 0; i < n; ++i) {
        double dot = (d_attn.row(i).array() * cl.attn[h].row(i).array()).sum();
        d_scores.row(i) = cl.attn[h].row(i).array() * (d_attn.row(i).array() - dot);
      }
      dq.middleCols(h * dh, dh).noalias() = d_scores * kh * scale;
      dk.middleCols(h * dh, dh).noalias() = d_scores.transpose() * qh * scale;
    }
    g.wq.noalias() += cl.x_in.transpose() * dq;
    g.bq.noalias() += dq.colwise().sum().transpose();
    g.wk.noalias() += cl.x_in.transpose() * dk;
    g.bk.noalias() += dk.colwise().sum().transpose();
    g.wv.noalias() += cl.x_in.transpose() * dv;
    g.bv.noalias() += dv.colwise().sum().transpose();
    d_x_in.noalias() += dq * w.wq.transpose();
    d_x_in.noalias() += dk * w.wk.transpose();
    d_x_in.noalias() += dv * w.wv.transpose();
    dx = std::move(d_x_in);
  }

  // embedding block: dropout, layer norm, then the two tables
  if (cache.emb_dropout.size() > 0) dx.array() *= cache.emb_dropout.array();
  MatrixXd d_emb =
      layer_norm_backward(dx, cache.emb_norm_x, cache.emb_inv_std, params.ln_emb_gain, grads.ln_emb_gain,
                          grads.ln_emb_bias);
  for (int i = 0; i < n; ++i) {
    grads.token_embedding.row(cache.token_ids[i]) += d_emb.row(i);
    grads.position_embedding.row(i) += d_emb.row(i);
  }
}

}  // namespace econet
