#include "core/model.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace medroute {

namespace {

constexpr double kLnEps = 1e-5;
constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluA = 0.044715;

double gelu(double x) {
  return 0.5 * x * (1.0 + std::tanh(kGeluC * (x + kGeluA * x * x * x)));
}

double gelu_grad(double x) {
  double inner = kGeluC * (x + kGeluA * x * x * x);
  double t = std::tanh(inner);
  double dinner = kGeluC * (1.0 + 3.0 * kGeluA * x * x);
  return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * dinner;
}

struct LnCache {
  Mat xhat;     // n x d
  Vec inv_std;  // n
};

// y = scale .* xhat + shift, per row.
Mat layer_norm(const Mat& x, const Vec& scale, const Vec& shift,
               LnCache* cache) {
  const long n = x.rows(), d = x.cols();
  Mat y(n, d);
  if (cache) {
    cache->xhat.resize(n, d);
    cache->inv_std.resize(n);
  }
  for (long i = 0; i < n; ++i) {
    double mean = x.row(i).mean();
    double var = (x.row(i).array() - mean).square().mean();
    double inv_std = 1.0 / std::sqrt(var + kLnEps);
    Eigen::RowVectorXd xhat = (x.row(i).array() - mean) * inv_std;
    y.row(i) =
        (xhat.array() * scale.transpose().array()) + shift.transpose().array();
    if (cache) {
      cache->xhat.row(i) = xhat;
      cache->inv_std(i) = inv_std;
    }
  }
  return y;
}

// Returns d(loss)/dx given d(loss)/dy; accumulates scale/shift grads.
Mat layer_norm_backward(const Mat& dy, const LnCache& cache, const Vec& scale,
                        Vec& dscale, Vec& dshift) {
  const long n = dy.rows(), d = dy.cols();
  Mat dx(n, d);
  for (long i = 0; i < n; ++i) {
    Eigen::ArrayXd dyr = dy.row(i).transpose().array();
    Eigen::ArrayXd xh = cache.xhat.row(i).transpose().array();
    Eigen::ArrayXd dxhat = dyr * scale.array();
    dscale.array() += dyr * xh;
    dshift.array() += dyr;
    double m1 = dxhat.mean();
    double m2 = (dxhat * xh).mean();
    dx.row(i) = (cache.inv_std(i) * (dxhat - m1 - xh * m2)).transpose();
  }
  (void)d;
  return dx;
}

struct LayerCache {
  LnCache ln1, ln2;
  Mat a;                 // LN1 output, n x d
  Mat q, k, v;           // n x d
  std::vector<Mat> p;    // per-head attention probs, n x n
  Mat o;                 // concatenated head outputs, n x d
  Mat drop1, drop2;      // inverted-dropout masks (empty when not training)
  Mat x_in, x_mid;       // residual stream snapshots
  Mat b_ln;              // LN2 output
  Mat h1;                // FF preactivation, n x d_ff
  Mat g;                 // gelu(h1)
};

struct ExampleCache {
  std::vector<int> ids;  // active token ids, length n
  std::vector<LayerCache> layers;
  Mat x_final;
};

Mat dropout_mask(SplitMix64& rng, long rows, long cols, double rate) {
  Mat m(rows, cols);
  double keep_scale = 1.0 / (1.0 - rate);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j)
      m(i, j) = rng.uniform() >= rate ? keep_scale : 0.0;
  return m;
}

// Forward over the active (non-pad) positions of one sequence. Pad
// positions contribute nothing to the CLS state, so trimming them equals
// the masked computation exactly.
Vec forward_one(const ModelParams& params, const ModelConfig& cfg,
                const TokenSequence& seq, bool training, uint64_t drop_seed,
                ExampleCache* cache) {
  const int n = seq.true_length;
  const int d = cfg.d_model, heads = cfg.n_heads, dh = cfg.d_head();
  const double scale = 1.0 / std::sqrt(double(dh));
  const bool drop = training && cfg.dropout_rate > 0.0;
  SplitMix64 drop_rng(drop_seed);

  Mat x(n, d);
  for (int i = 0; i < n; ++i) {
    int id = seq.ids[size_t(i)];
    require(id >= 0 && id < cfg.vocab_size, ErrorKind::InvalidArgument,
            "token id out of vocabulary range");
    x.row(i) = params.token_emb.row(id) + params.pos_emb.row(i);
  }
  if (cache) {
    cache->ids.assign(seq.ids.begin(), seq.ids.begin() + n);
    cache->layers.resize(size_t(cfg.n_layers));
  }

  for (int l = 0; l < cfg.n_layers; ++l) {
    const LayerParams& lp = params.layers[size_t(l)];
    LayerCache* lc = cache ? &cache->layers[size_t(l)] : nullptr;
    if (lc) lc->x_in = x;

    Mat a = layer_norm(x, lp.ln1_scale, lp.ln1_shift, lc ? &lc->ln1 : nullptr);
    Mat q = (a * lp.wq).rowwise() + lp.bq.transpose();
    Mat k = (a * lp.wk).rowwise() + lp.bk.transpose();
    Mat v = (a * lp.wv).rowwise() + lp.bv.transpose();

    Mat o(n, d);
    std::vector<Mat> probs;
    if (lc) probs.reserve(size_t(heads));
    for (int h = 0; h < heads; ++h) {
      auto qh = q.middleCols(h * dh, dh);
      auto kh = k.middleCols(h * dh, dh);
      auto vh = v.middleCols(h * dh, dh);
      Mat s = qh * kh.transpose() * scale;  // n x n
      Mat p(n, n);
      for (int i = 0; i < n; ++i) {
        double mx = s.row(i).maxCoeff();
        Eigen::ArrayXd e = (s.row(i).array() - mx).exp();
        p.row(i) = (e / e.sum()).transpose();
      }
      o.middleCols(h * dh, dh) = p * vh;
      if (lc) probs.push_back(std::move(p));
    }
    Mat attn_out = (o * lp.wo).rowwise() + lp.bo.transpose();
    if (drop) {
      Mat mask = dropout_mask(drop_rng, n, d, cfg.dropout_rate);
      attn_out.array() *= mask.array();
      if (lc) lc->drop1 = std::move(mask);
    }
    Mat x_mid = x + attn_out;

    Mat b = layer_norm(x_mid, lp.ln2_scale, lp.ln2_shift,
                       lc ? &lc->ln2 : nullptr);
    Mat h1 = (b * lp.w1).rowwise() + lp.b1.transpose();
    Mat g = h1.unaryExpr([](double v_) { return gelu(v_); });
    Mat ff_out = (g * lp.w2).rowwise() + lp.b2.transpose();
    if (drop) {
      Mat mask = dropout_mask(drop_rng, n, d, cfg.dropout_rate);
      ff_out.array() *= mask.array();
      if (lc) lc->drop2 = std::move(mask);
    }
    Mat x_out = x_mid + ff_out;

    if (lc) {
      lc->a = std::move(a);
      lc->q = std::move(q);
      lc->k = std::move(k);
      lc->v = std::move(v);
      lc->p = std::move(probs);
      lc->o = std::move(o);
      lc->x_mid = std::move(x_mid);
      lc->b_ln = std::move(b);
      lc->h1 = std::move(h1);
      lc->g = std::move(g);
    }
    x = std::move(x_out);
  }

  if (cache) cache->x_final = x;
  Vec logits =
      (x.row(0) * params.w_cls).transpose() + params.b_cls;
  return logits;
}

void backward_one(const ModelParams& params, const ModelConfig& cfg,
                  const ExampleCache& cache, const Vec& dlogits,
                  ModelParams& grads) {
  const int n = int(cache.ids.size());
  const int d = cfg.d_model, heads = cfg.n_heads, dh = cfg.d_head();
  const double scale = 1.0 / std::sqrt(double(dh));

  grads.w_cls += cache.x_final.row(0).transpose() * dlogits.transpose();
  grads.b_cls += dlogits;

  Mat dx = Mat::Zero(n, d);
  dx.row(0) = (params.w_cls * dlogits).transpose();

  for (int l = cfg.n_layers - 1; l >= 0; --l) {
    const LayerParams& lp = params.layers[size_t(l)];
    const LayerCache& lc = cache.layers[size_t(l)];
    LayerParams& gl = grads.layers[size_t(l)];

    // FF block.
    Mat dff = dx;
    if (lc.drop2.size()) dff.array() *= lc.drop2.array();
    Mat dg = dff * lp.w2.transpose();
    gl.w2 += lc.g.transpose() * dff;
    gl.b2 += dff.colwise().sum().transpose();
    Mat dh1 =
        dg.array() * lc.h1.unaryExpr([](double v_) { return gelu_grad(v_); })
                         .array();
    Mat db = dh1 * lp.w1.transpose();
    gl.w1 += lc.b_ln.transpose() * dh1;
    gl.b1 += dh1.colwise().sum().transpose();
    Mat dx_mid =
        dx + layer_norm_backward(db, lc.ln2, lp.ln2_scale, gl.ln2_scale,
                                 gl.ln2_shift);

    // Attention block.
    Mat dao = dx_mid;
    if (lc.drop1.size()) dao.array() *= lc.drop1.array();
    Mat do_ = dao * lp.wo.transpose();
    gl.wo += lc.o.transpose() * dao;
    gl.bo += dao.colwise().sum().transpose();

    Mat dq = Mat::Zero(n, d), dk = Mat::Zero(n, d), dv = Mat::Zero(n, d);
    for (int h = 0; h < heads; ++h) {
      auto kh = lc.k.middleCols(h * dh, dh);
      auto qh = lc.q.middleCols(h * dh, dh);
      auto vh = lc.v.middleCols(h * dh, dh);
      const Mat& p = lc.p[size_t(h)];
      Mat doh = do_.middleCols(h * dh, dh);
      Mat dp = doh * vh.transpose();
      dv.middleCols(h * dh, dh) = p.transpose() * doh;
      Mat ds(n, n);
      for (int i = 0; i < n; ++i) {
        double dot = dp.row(i).dot(p.row(i));
        ds.row(i) = p.row(i).array() * (dp.row(i).array() - dot);
      }
      dq.middleCols(h * dh, dh) = ds * kh * scale;
      dk.middleCols(h * dh, dh) = ds.transpose() * qh * scale;
    }
    Mat da = dq * lp.wq.transpose() + dk * lp.wk.transpose() +
             dv * lp.wv.transpose();
    gl.wq += lc.a.transpose() * dq;
    gl.bq += dq.colwise().sum().transpose();
    gl.wk += lc.a.transpose() * dk;
    gl.bk += dk.colwise().sum().transpose();
    gl.wv += lc.a.transpose() * dv;
    gl.bv += dv.colwise().sum().transpose();

    dx = dx_mid + layer_norm_backward(da, lc.ln1, lp.ln1_scale, gl.ln1_scale,
                                      gl.ln1_shift);
  }

  for (int i = 0; i < n; ++i) {
    grads.token_emb.row(cache.ids[size_t(i)]) += dx.row(i);
    grads.pos_emb.row(i) += dx.row(i);
  }
}

uint64_t example_drop_seed(uint64_t base, size_t index) {
  return base + 0x9E3779B97F4A7C15ull * (uint64_t(index) + 1);
}

}  // namespace

void ModelConfig::validate() const {
  require(vocab_size >= 1 && n_classes >= 2 && max_len >= 2 && d_model >= 1 &&
              n_heads >= 1 && n_layers >= 1 && d_ff >= 1,
          ErrorKind::InvalidArgument, "model dimensions out of range");
  require(d_model % n_heads == 0, ErrorKind::InvalidArgument,
          "d_model must be divisible by n_heads");
  require(dropout_rate >= 0.0 && dropout_rate < 1.0,
          ErrorKind::InvalidArgument, "dropout_rate must be in [0,1)");
}

ModelParams ModelParams::zeros(const ModelConfig& cfg) {
  ModelParams p;
  p.token_emb = Mat::Zero(cfg.vocab_size, cfg.d_model);
  p.pos_emb = Mat::Zero(cfg.max_len, cfg.d_model);
  p.layers.resize(size_t(cfg.n_layers));
  for (auto& l : p.layers) {
    l.wq = l.wk = l.wv = l.wo = Mat::Zero(cfg.d_model, cfg.d_model);
    l.bq = l.bk = l.bv = l.bo = Vec::Zero(cfg.d_model);
    l.w1 = Mat::Zero(cfg.d_model, cfg.d_ff);
    l.b1 = Vec::Zero(cfg.d_ff);
    l.w2 = Mat::Zero(cfg.d_ff, cfg.d_model);
    l.b2 = Vec::Zero(cfg.d_model);
    l.ln1_scale = l.ln2_scale = Vec::Zero(cfg.d_model);
    l.ln1_shift = l.ln2_shift = Vec::Zero(cfg.d_model);
  }
  p.w_cls = Mat::Zero(cfg.d_model, cfg.n_classes);
  p.b_cls = Vec::Zero(cfg.n_classes);
  return p;
}

namespace {

template <typename Params, typename F>
void visit_tensors(Params& p, F&& f) {
  f("token_emb", p.token_emb.data(), size_t(p.token_emb.size()));
  f("pos_emb", p.pos_emb.data(), size_t(p.pos_emb.size()));
  for (size_t l = 0; l < p.layers.size(); ++l) {
    auto& lay = p.layers[l];
    std::string pre = "layer" + std::to_string(l) + ".";
    auto emit = [&](const char* name, auto& m) {
      f(pre + name, m.data(), size_t(m.size()));
    };
    emit("wq", lay.wq);
    emit("bq", lay.bq);
    emit("wk", lay.wk);
    emit("bk", lay.bk);
    emit("wv", lay.wv);
    emit("bv", lay.bv);
    emit("wo", lay.wo);
    emit("bo", lay.bo);
    emit("w1", lay.w1);
    emit("b1", lay.b1);
    emit("w2", lay.w2);
    emit("b2", lay.b2);
    emit("ln1_scale", lay.ln1_scale);
    emit("ln1_shift", lay.ln1_shift);
    emit("ln2_scale", lay.ln2_scale);
    emit("ln2_shift", lay.ln2_shift);
  }
  f("w_cls", p.w_cls.data(), size_t(p.w_cls.size()));
  f("b_cls", p.b_cls.data(), size_t(p.b_cls.size()));
}

}  // namespace

std::vector<TensorView> ModelParams::tensors() {
  std::vector<TensorView> out;
  visit_tensors(*this, [&](std::string name, double* data, size_t n) {
    out.push_back({std::move(name), data, n});
  });
  return out;
}

std::vector<TensorView> ModelParams::tensors() const {
  return const_cast<ModelParams*>(this)->tensors();
}

void ModelParams::check_finite(const std::string& context) const {
  for (const auto& t : tensors())
    for (size_t i = 0; i < t.size; ++i)
      require(std::isfinite(t.data[i]), ErrorKind::Internal,
              context + ": non-finite value in tensor " + t.name);
}

ModelParams init_params(const ModelConfig& cfg) {
  cfg.validate();
  ModelParams p = ModelParams::zeros(cfg);
  SplitMix64 rng(cfg.seed);
  auto glorot = [&](Mat& m) {
    double bound = std::sqrt(6.0 / double(m.rows() + m.cols()));
    for (long i = 0; i < m.rows(); ++i)
      for (long j = 0; j < m.cols(); ++j)
        m(i, j) = rng.uniform(-bound, bound);
  };
  glorot(p.token_emb);
  glorot(p.pos_emb);
  for (auto& l : p.layers) {
    glorot(l.wq);
    glorot(l.wk);
    glorot(l.wv);
    glorot(l.wo);
    glorot(l.w1);
    glorot(l.w2);
    l.ln1_scale.setOnes();
    l.ln2_scale.setOnes();
  }
  glorot(p.w_cls);
  return p;
}

Vec softmax_row(const Vec& logits) {
  double mx = logits.maxCoeff();
  Eigen::ArrayXd e = (logits.array() - mx).exp();
  return (e / e.sum()).matrix();
}

LossAndGrad cross_entropy_loss(const Mat& logits,
                               const std::vector<int>& targets) {
  const long b = logits.rows(), c = logits.cols();
  require(size_t(b) == targets.size(), ErrorKind::InvalidArgument,
          "logits/targets batch size mismatch");
  LossAndGrad out{0.0, Mat::Zero(b, c)};
  for (long i = 0; i < b; ++i) {
    int t = targets[size_t(i)];
    require(t >= 0 && t < c, ErrorKind::InvalidArgument,
            "target class id out of range");
    double mx = logits.row(i).maxCoeff();
    double lse = mx + std::log((logits.row(i).array() - mx).exp().sum());
    out.loss += (lse - logits(i, t)) / double(b);
    Vec p = softmax_row(logits.row(i).transpose());
    out.dlogits.row(i) = p.transpose() / double(b);
    out.dlogits(i, t) -= 1.0 / double(b);
  }
  return out;
}

Mat forward(const ModelParams& params, const ModelConfig& cfg,
            const Batch& batch, bool training, uint64_t dropout_seed) {
  cfg.validate();
  Mat logits(long(batch.seqs.size()), cfg.n_classes);
  for (size_t i = 0; i < batch.seqs.size(); ++i) {
    require(int(batch.seqs[i].ids.size()) == cfg.max_len,
            ErrorKind::InvalidArgument, "sequence length != cfg.max_len");
    logits.row(long(i)) =
        forward_one(params, cfg, batch.seqs[i], training,
                    example_drop_seed(dropout_seed, i), nullptr)
            .transpose();
  }
  return logits;
}

double forward_backward(const ModelParams& params, const ModelConfig& cfg,
                        const Batch& batch, ModelParams& grads, bool training,
                        uint64_t dropout_seed) {
  cfg.validate();
  const size_t b = batch.seqs.size();
  require(b > 0 && batch.targets.size() == b, ErrorKind::InvalidArgument,
          "batch must carry one target per sequence");
  double loss = 0.0;
  for (size_t i = 0; i < b; ++i) {
    ExampleCache cache;
    Vec logits = forward_one(params, cfg, batch.seqs[i], training,
                             example_drop_seed(dropout_seed, i), &cache);
    int t = batch.targets[i];
    require(t >= 0 && t < cfg.n_classes, ErrorKind::InvalidArgument,
            "target class id out of range");
    double mx = logits.maxCoeff();
    double lse = mx + std::log((logits.array() - mx).exp().sum());
    require(std::isfinite(lse), ErrorKind::Internal,
            "non-finite loss term in tensor logits");
    loss += (lse - logits(t)) / double(b);
    Vec dlogits = softmax_row(logits) / double(b);
    dlogits(t) -= 1.0 / double(b);
    backward_one(params, cfg, cache, dlogits, grads);
  }
  return loss;
}

double compute_loss(const ModelParams& params, const ModelConfig& cfg,
                    const Batch& batch) {
  Mat logits = forward(params, cfg, batch);
  return cross_entropy_loss(logits, batch.targets).loss;
}

std::vector<ScoredClass> predict_topk(const ModelParams& params,
                                      const ModelConfig& cfg,
                                      const TokenSequence& seq, int k) {
  require(k >= 1 && k <= cfg.n_classes, ErrorKind::InvalidArgument,
          "k must be in [1, n_classes]");
  Batch b;
  b.seqs.push_back(seq);
  Mat logits = forward(params, cfg, b);
  Vec p = softmax_row(logits.row(0).transpose());
  std::vector<ScoredClass> ranked;
  ranked.reserve(size_t(cfg.n_classes));
  for (int c = 0; c < cfg.n_classes; ++c) ranked.push_back({c, p(c)});
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const ScoredClass& a, const ScoredClass& b_) {
                     return a.probability > b_.probability;
                   });
  ranked.resize(size_t(k));
  return ranked;
}

}  // namespace medroute
