#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace econet {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct ModelConfig {
  int n_layers = 4;
  int n_heads = 4;
  int hidden_dim = 128;
  int ffn_dim = 512;
  int vocab_size = 0;
  int max_seq_len = 128;
  double dropout_rate = 0.1;

  int head_dim() const { return hidden_dim / n_heads; }
  void validate() const;
};

struct LayerParams {
  MatrixXd wq, wk, wv, wo;          // hidden x hidden
  VectorXd bq, bk, bv, bo;          // hidden
  VectorXd ln1_gain, ln1_bias;      // post-attention layer norm
  MatrixXd w_ffn1;                  // hidden x ffn
  VectorXd b_ffn1;                  // ffn
  MatrixXd w_ffn2;                  // ffn x hidden
  VectorXd b_ffn2;                  // hidden
  VectorXd ln2_gain, ln2_bias;      // post-ffn layer norm
};

// Encoder weights, double precision throughout. Also used as the
// congruent container for gradients and optimizer moments.
struct MiniLmParameters {
  ModelConfig config;
  MatrixXd token_embedding;     // vocab x hidden
  MatrixXd position_embedding;  // max_seq_len x hidden
  VectorXd ln_emb_gain, ln_emb_bias;
  std::vector<LayerParams> layers;

  static MiniLmParameters init(const ModelConfig& config, uint64_t seed);
  static MiniLmParameters zeros(const ModelConfig& config);
};

// Applies fn(name, tensor) to every parameter tensor, in a fixed order.
template <typename Params, typename Fn>
void visit_tensors(Params& p, Fn&& fn) {
  fn("token_embedding", p.token_embedding);
  fn("position_embedding", p.position_embedding);
  fn("ln_emb_gain", p.ln_emb_gain);
  fn("ln_emb_bias", p.ln_emb_bias);
  for (size_t l = 0; l < p.layers.size(); ++l) {
    auto& layer = p.layers[l];
    std::string prefix = "layer" + std::to_string(l) + ".";
    fn(prefix + "wq", layer.wq);
    fn(prefix + "wk", layer.wk);
    fn(prefix + "wv", layer.wv);
    fn(prefix + "wo", layer.wo);
    fn(prefix + "bq", layer.bq);
    fn(prefix + "bk", layer.bk);
    fn(prefix + "bv", layer.bv);
    fn(prefix + "bo", layer.bo);
    fn(prefix + "ln1_gain", layer.ln1_gain);
    fn(prefix + "ln1_bias", layer.ln1_bias);
    fn(prefix + "w_ffn1", layer.w_ffn1);
    fn(prefix + "b_ffn1", layer.b_ffn1);
    fn(prefix + "w_ffn2", layer.w_ffn2);
    fn(prefix + "b_ffn2", layer.b_ffn2);
    fn(prefix + "ln2_gain", layer.ln2_gain);
    fn(prefix + "ln2_bias", layer.ln2_bias);
  }
}

// Per-layer hidden states and attention probabilities of one forward
// pass. hidden_states[0] is the embedding-block output; attention is
// indexed [layer][head](query, key) and rows sum to one.
struct ForwardTrace {
  std::vector<MatrixXd> hidden_states;             // n_layers+1 entries, seq x hidden
  std::vector<std::vector<MatrixXd>> attention;    // [layer][head], seq x seq
  const MatrixXd& final_hidden() const { return hidden_states.back(); }
};

// Intermediates kept for the analytic backward pass.
struct ForwardCache {
  std::vector<int> token_ids;
  bool train_mode = false;
  MatrixXd emb_sum;       // token + position rows
  MatrixXd emb_norm_x;    // normalized embedding (pre-gain)
  VectorXd emb_inv_std;
  MatrixXd emb_dropout;   // scale mask (empty in eval mode)
  struct Layer {
    MatrixXd x_in;                 // layer input
    MatrixXd q, k, v;
    std::vector<MatrixXd> attn;    // post-softmax, per head
    std::vector<MatrixXd> attn_dropout;
    MatrixXd ctx;                  // concatenated head outputs
    MatrixXd attn_out_dropout;
    MatrixXd r1;                   // residual before ln1
    MatrixXd ln1_x;                // normalized r1 (pre-gain)
    VectorXd ln1_inv_std;
    MatrixXd x_mid;                // ln1 output
    MatrixXd ffn_pre;              // before gelu
    MatrixXd ffn_act;              // after gelu
    MatrixXd ffn_dropout;
    MatrixXd r2;
    MatrixXd ln2_x;
    VectorXd ln2_inv_std;
  };
  std::vector<Layer> layers;
};

// Full forward pass. Eval mode (train_mode=false) is deterministic; in
// train mode dropout masks are drawn from rng_seed. Throws on
// out-of-range token ids or over-length input.
ForwardTrace forward(const MiniLmParameters& params, std::span<const int> token_ids, bool train_mode,
                     uint64_t rng_seed, ForwardCache* cache = nullptr);

// Accumulates d(loss)/d(params) into grads given d(loss)/d(final hidden).
void backward(const MiniLmParameters& params, const ForwardCache& cache, const MatrixXd& d_final,
              MiniLmParameters& grads);

double gelu(double x);
double gelu_derivative(double x);

}  // namespace econet
