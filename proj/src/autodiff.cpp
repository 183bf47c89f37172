#include "smi/autodiff.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <memory>

#include "smi/errors.hpp"

namespace smi {

namespace {
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using MapConstMat = Eigen::Map<const RowMat>;
using MapVec = Eigen::Map<Eigen::VectorXd>;
using MapConstVec = Eigen::Map<const Eigen::VectorXd>;
}  // namespace

Tape::Id Tape::push(Tensor val, bool requires, std::function<void(Tape&)> back) {
  nodes_.push_back(Node{std::move(val), {}, requires, nullptr, std::move(back)});
  return static_cast<Id>(nodes_.size() - 1);
}

Tape::Id Tape::constant(Tensor v) { return push(std::move(v), false, {}); }

Tape::Id Tape::input(Tensor v) { return push(std::move(v), true, {}); }

Tape::Id Tape::param(Tensor& t) {
  Id id = push(t, true, {});
  node(id).bound = &t;
  return id;
}

const Tensor& Tape::value(Id id) const { return node(id).val; }

double Tape::scalar_value(Id id) const {
  const Tensor& t = node(id).val;
  if (t.numel() != 1) throw InvalidInputError("expected a scalar node");
  return t.data[0];
}

const std::vector<double>& Tape::grad(Id id) const {
  if (!node(id).requires_grad)
    throw InvalidInputError("gradient requested for a constant node");
  return node(id).grad;
}

void Tape::backward(Id root, double seed) {
  Node& r = node(root);
  if (r.val.numel() != 1) throw InvalidInputError("backward root must be a scalar");
  if (!r.requires_grad) throw InvalidInputError("backward root does not require grad");
  for (Node& n : nodes_)
    if (n.requires_grad) n.grad.assign(n.val.data.size(), 0.0);
  r.grad[0] = seed;
  for (Id i = root; i >= 0; --i) {
    Node& n = node(i);
    if (n.requires_grad && n.back) n.back(*this);
  }
  for (Node& n : nodes_) {
    if (n.bound) {
      n.bound->ensure_grad();
      for (size_t i = 0; i < n.grad.size(); ++i) (*n.bound->grad)[i] += n.grad[i];
    }
  }
}

Tape::Id Tape::sinc_filter_bank(Id a, Id b, const SincBankSpec& spec) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  if (av.shape.size() != 1 || bv.shape.size() != 1 || av.numel() != bv.numel())
    throw InvalidInputError("sinc_filter_bank expects equal-length 1-d parameters");
  const int64_t nf = av.numel();
  const int64_t klen = spec.kernel_len;

  auto cuts = std::make_shared<std::vector<Cutoffs>>(static_cast<size_t>(nf));
  Tensor out = Tensor::zeros({nf, klen});
  for (int64_t f = 0; f < nf; ++f) {
    (*cuts)[f] = cutoffs_from_params(av.data[f], bv.data[f], spec);
    band_pass_kernel((*cuts)[f].f1_hz, (*cuts)[f].f2_hz, spec,
                     std::span<double>(out.data.data() + f * klen, klen));
  }

  bool req = wants(a) || wants(b);
  Id id = push(std::move(out), req, {});
  if (!req) return id;
  node(id).back = [id, a, b, spec, nf, klen, cuts](Tape& t) {
    const auto& gout = t.gbuf(id);
    std::vector<double> dk1(static_cast<size_t>(klen)), dk2(static_cast<size_t>(klen));
    for (int64_t f = 0; f < nf; ++f) {
      const Cutoffs& c = (*cuts)[f];
      band_pass_kernel_grads(c.f1_hz, c.f2_hz, spec, dk1, dk2);
      double s1 = 0.0, s2 = 0.0;
      for (int64_t n = 0; n < klen; ++n) {
        const double g = gout[static_cast<size_t>(f * klen + n)];
        s1 += g * dk1[static_cast<size_t>(n)];
        s2 += g * dk2[static_cast<size_t>(n)];
      }
      if (t.wants(a)) t.gbuf(a)[f] += s1 * c.df1_da + s2 * c.df2_da;
      if (t.wants(b)) t.gbuf(b)[f] += s2 * c.df2_db;
    }
  };
  return id;
}

Tape::Id Tape::conv1d(Id x, Id w, Id bias) {
  const Tensor& xv = value(x);
  const Tensor& wv = value(w);
  const Tensor& bv = value(bias);
  if (xv.shape.size() != 2 || wv.shape.size() != 3)
    throw InvalidInputError("conv1d expects (Cin,T) input and (Cout,Cin,K) weights");
  const int64_t cin = xv.shape[0], tlen = xv.shape[1];
  const int64_t cout = wv.shape[0], k = wv.shape[2];
  if (wv.shape[1] != cin) throw InvalidInputError("conv1d channel mismatch");
  if (bv.numel() != cout) throw InvalidInputError("conv1d bias length mismatch");
  const int64_t tout = tlen - k + 1;
  if (tout <= 0) throw InvalidInputError("conv1d input shorter than kernel");

  // im2col: (tout, cin*k); kept alive for the backward pass
  const int64_t ck = cin * k;
  auto im2col = std::make_shared<std::vector<double>>(static_cast<size_t>(tout * ck));
  for (int64_t t = 0; t < tout; ++t) {
    double* row = im2col->data() + t * ck;
    for (int64_t c = 0; c < cin; ++c) {
      const double* src = xv.data.data() + c * tlen + t;
      std::copy(src, src + k, row + c * k);
    }
  }

  Tensor out = Tensor::zeros({cout, tout});
  {
    MapConstMat wm(wv.data.data(), cout, ck);
    MapConstMat mm(im2col->data(), tout, ck);
    MapMat om(out.data.data(), cout, tout);
    om.noalias() = wm * mm.transpose();
    om.colwise() += MapConstVec(bv.data.data(), cout);
  }

  bool req = wants(x) || wants(w) || wants(bias);
  Id id = push(std::move(out), req, {});
  if (!req) return id;
  node(id).back = [id, x, w, bias, cin, tlen, cout, k, tout, ck, im2col](Tape& t) {
    MapConstMat gm(t.gbuf(id).data(), cout, tout);
    if (t.wants(w)) {
      MapConstMat mm(im2col->data(), tout, ck);
      MapMat dwm(t.gbuf(w).data(), cout, ck);
      dwm.noalias() += gm * mm;
    }
    if (t.wants(bias)) {
      MapVec dbv(t.gbuf(bias).data(), cout);
      dbv.noalias() += gm.rowwise().sum();
    }
    if (t.wants(x)) {
      const Tensor& wv2 = t.value(w);
      MapConstMat wm(wv2.data.data(), cout, ck);
      RowMat dcol(tout, ck);
      dcol.noalias() = gm.transpose() * wm;
      auto& gx = t.gbuf(x);
      for (int64_t tt = 0; tt < tout; ++tt) {
        const double* row = dcol.data() + tt * ck;
        for (int64_t c = 0; c < cin; ++c) {
          double* dst = gx.data() + c * tlen + tt;
          const double* src = row + c * k;
          for (int64_t j = 0; j < k; ++j) dst[j] += src[j];
        }
      }
    }
  };
  return id;
}

Tape::Id Tape::maxpool1d(Id x, int64_t factor) {
  const Tensor& xv = value(x);
  if (xv.shape.size() != 2) throw InvalidInputError("maxpool1d expects (C,T)");
  if (factor < 1) throw InvalidInputError("maxpool1d factor must be >= 1");
  const int64_t c = xv.shape[0], tlen = xv.shape[1];
  const int64_t tout = tlen / factor;  // trailing remainder dropped
  if (tout < 1) throw InvalidInputError("maxpool1d input shorter than factor");

  Tensor out = Tensor::zeros({c, tout});
  auto argmax = std::make_shared<std::vector<int64_t>>(static_cast<size_t>(c * tout));
  for (int64_t ch = 0; ch < c; ++ch) {
    const double* row = xv.data.data() + ch * tlen;
    for (int64_t t = 0; t < tout; ++t) {
      int64_t best = t * factor;
      for (int64_t j = 1; j < factor; ++j)
        if (row[t * factor + j] > row[best]) best = t * factor + j;
      out.data[static_cast<size_t>(ch * tout + t)] = row[best];
      (*argmax)[static_cast<size_t>(ch * tout + t)] = ch * tlen + best;
    }
  }

  bool req = wants(x);
  Id id = push(std::move(out), req, {});
  if (!req) return id;
  node(id).back = [id, x, argmax](Tape& t) {
    const auto& g = t.gbuf(id);
    auto& gx = t.gbuf(x);
    for (size_t i = 0; i < g.size(); ++i) gx[static_cast<size_t>((*argmax)[i])] += g[i];
  };
  return id;
}

Tape::Id Tape::layer_norm(Id x, Id gain, Id bias, double eps) {
  const Tensor& xv = value(x);
  const Tensor& gv = value(gain);
  const Tensor& bv = value(bias);
  if (xv.shape.size() != 2) throw InvalidInputError("layer_norm expects (C,T)");
  const int64_t c = xv.shape[0], tlen = xv.shape[1];
  if (gv.numel() != c || bv.numel() != c)
    throw InvalidInputError("layer_norm affine length mismatch");
  const int64_t n = c * tlen;

  double mu = 0.0;
  for (double v : xv.data) mu += v;
  mu /= static_cast<double>(n);
  double var = 0.0;
  for (double v : xv.data) var += (v - mu) * (v - mu);
  var /= static_cast<double>(n);
  const double inv = 1.0 / std::sqrt(var + eps);

  auto norm = std::make_shared<std::vector<double>>(static_cast<size_t>(n));
  Tensor out = Tensor::zeros({c, tlen});
  for (int64_t ch = 0; ch < c; ++ch) {
    for (int64_t t = 0; t < tlen; ++t) {
      const size_t i = static_cast<size_t>(ch * tlen + t);
      (*norm)[i] = (xv.data[i] - mu) * inv;
      out.data[i] = gv.data[static_cast<size_t>(ch)] * (*norm)[i] +
                    bv.data[static_cast<size_t>(ch)];
    }
  }

  bool req = wants(x) || wants(gain) || wants(bias);
  Id id = push(std::move(out), req, {});
  if (!req) return id;
  node(id).back = [id, x, gain, bias, c, tlen, n, inv, norm](Tape& t) {
    const auto& g = t.gbuf(id);
    const Tensor& gv2 = t.value(gain);
    if (t.wants(bias)) {
      auto& gb = t.gbuf(bias);
      for (int64_t ch = 0; ch < c; ++ch) {
        double s = 0.0;
        for (int64_t tt = 0; tt < tlen; ++tt) s += g[static_cast<size_t>(ch * tlen + tt)];
        gb[static_cast<size_t>(ch)] += s;
      }
    }
    if (t.wants(gain)) {
      auto& gg = t.gbuf(gain);
      for (int64_t ch = 0; ch < c; ++ch) {
        double s = 0.0;
        for (int64_t tt = 0; tt < tlen; ++tt) {
          const size_t i = static_cast<size_t>(ch * tlen + tt);
          s += g[i] * (*norm)[i];
        }
        gg[static_cast<size_t>(ch)] += s;
      }
    }
    if (t.wants(x)) {
      // dy = g * gain (per channel); dx = inv*(dy - mean(dy) - norm*mean(dy*norm))
      std::vector<double> dy(static_cast<size_t>(n));
      double sum_dy = 0.0, sum_dyn = 0.0;
      for (int64_t ch = 0; ch < c; ++ch) {
        const double gc = gv2.data[static_cast<size_t>(ch)];
        for (int64_t tt = 0; tt < tlen; ++tt) {
          const size_t i = static_cast<size_t>(ch * tlen + tt);
          dy[i] = g[i] * gc;
          sum_dy += dy[i];
          sum_dyn += dy[i] * (*norm)[i];
        }
      }
      const double m_dy = sum_dy / static_cast<double>(n);
      const double m_dyn = sum_dyn / static_cast<double>(n);
      auto& gx = t.gbuf(x);
      for (size_t i = 0; i < static_cast<size_t>(n); ++i)
        gx[i] += inv * (dy[i] - m_dy - (*norm)[i] * m_dyn);
    }
  };
  return id;
}

Tape::Id Tape::leaky_relu(Id x, double slope) {
  const Tensor& xv = value(x);
  Tensor out = xv;
  for (double& v : out.data)
    if (v < 0.0) v *= slope;

  bool req = wants(x);
  Id id = push(std::move(out), req, {});
  if (!req) return id;
  node(id).back = [id, x, slope](Tape& t) {
    const auto& g = t.gbuf(id);
    const Tensor& xv2 = t.value(x);
    auto& gx = t.gbuf(x);
    for (size_t i = 0; i < g.size(); ++i)
      gx[i] += g[i] * (xv2.data[i] >= 0.0 ? 1.0 : slope);
  };
  return id;
}

Tape::Id Tape::reshape(Id x, std::vector<int64_t> shape) {
  const Tensor& xv = value(x);
  if (shape_numel(shape) != xv.numel())
    throw InvalidInputError("reshape element count mismatch");
  Tensor out(std::move(shape), xv.data);

  bool req = wants(x);
  Id id = push(std::move(out), req, {});
  if (!req) return id;
  node(id).back = [id, x](Tape& t) {
    const auto& g = t.gbuf(id);
    auto& gx = t.gbuf(x);
    for (size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
  };
  return id;
}

Tape::Id Tape::dense(Id x, Id w, Id b) {
  const Tensor& xv = value(x);
  const Tensor& wv = value(w);
  const Tensor& bv = value(b);
  if (xv.shape.size() != 1 || wv.shape.size() != 2)
    throw InvalidInputError("dense expects (n) input and (m,n) weights");
  const int64_t n = xv.numel(), m = wv.shape[0];
  if (wv.shape[1] != n || bv.numel() != m)
    throw InvalidInputError("dense dimension mismatch");

  Tensor out = Tensor::zeros({m});
  {
    MapConstMat wm(wv.data.data(), m, n);
    MapConstVec xm(xv.data.data(), n);
    MapVec om(out.data.data(), m);
    om.noalias() = wm * xm + MapConstVec(bv.data.data(), m);
  }

  bool req = wants(x) || wants(w) || wants(b);
  Id id = push(std::move(out), req, {});
  if (!req) return id;
  node(id).back = [id, x, w, b, n, m](Tape& t) {
    MapConstVec g(t.gbuf(id).data(), m);
    if (t.wants(w)) {
      MapConstVec xm(t.value(x).data.data(), n);
      MapMat dwm(t.gbuf(w).data(), m, n);
      dwm.noalias() += g * xm.transpose();
    }
    if (t.wants(b)) {
      MapVec db(t.gbuf(b).data(), m);
      db.noalias() += g;
    }
    if (t.wants(x)) {
      MapConstMat wm(t.value(w).data.data(), m, n);
      MapVec dx(t.gbuf(x).data(), n);
      dx.noalias() += wm.transpose() * g;
    }
  };
  return id;
}

Tape::Id Tape::softmax(Id x) {
  const Tensor& xv = value(x);
  if (xv.shape.size() != 1) throw InvalidInputError("softmax expects a vector");
  Tensor out = xv;
  const double mx = *std::max_element(out.data.begin(), out.data.end());
  double sum = 0.0;
  for (double& v : out.data) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : out.data) v /= sum;

  bool req = wants(x);
  Id id = push(std::move(out), req, {});
  if (!req) return id;
  node(id).back = [id, x](Tape& t) {
    const auto& g = t.gbuf(id);
    const Tensor& y = t.value(id);
    double dot = 0.0;
    for (size_t i = 0; i < g.size(); ++i) dot += g[i] * y.data[i];
    auto& gx = t.gbuf(x);
    for (size_t i = 0; i < g.size(); ++i) gx[i] += y.data[i] * (g[i] - dot);
  };
  return id;
}

Tape::Id Tape::pick(Id x, int64_t index) {
  const Tensor& xv = value(x);
  if (index < 0 || index >= xv.numel())
    throw InvalidInputError("pick index out of range");
  Tensor out({1}, {xv.data[static_cast<size_t>(index)]});

  bool req = wants(x);
  Id id = push(std::move(out), req, {});
  if (!req) return id;
  node(id).back = [id, x, index](Tape& t) {
    t.gbuf(x)[static_cast<size_t>(index)] += t.gbuf(id)[0];
  };
  return id;
}

Tape::Id Tape::affine(Id x, double mul, double add) {
  const Tensor& xv = value(x);
  if (xv.numel() != 1) throw InvalidInputError("affine expects a scalar");
  Tensor out({1}, {mul * xv.data[0] + add});

  bool req = wants(x);
  Id id = push(std::move(out), req, {});
  if (!req) return id;
  node(id).back = [id, x, mul](Tape& t) { t.gbuf(x)[0] += mul * t.gbuf(id)[0]; };
  return id;
}

Tape::Id Tape::cross_entropy_logits(Id logits, int64_t label) {
  const Tensor& zv = value(logits);
  if (zv.shape.size() != 1) throw InvalidInputError("cross_entropy expects a vector");
  if (label < 0 || label >= zv.numel())
    throw InvalidInputError("cross_entropy label out of range");

  const double mx = *std::max_element(zv.data.begin(), zv.data.end());
  double sum = 0.0;
  auto probs = std::make_shared<std::vector<double>>(zv.data.size());
  for (size_t i = 0; i < zv.data.size(); ++i) {
    (*probs)[i] = std::exp(zv.data[i] - mx);
    sum += (*probs)[i];
  }
  for (double& p : *probs) p /= sum;
  const double lse = mx + std::log(sum);
  Tensor out({1}, {lse - zv.data[static_cast<size_t>(label)]});

  bool req = wants(logits);
  Id id = push(std::move(out), req, {});
  if (!req) return id;
  node(id).back = [id, logits, label, probs](Tape& t) {
    const double g = t.gbuf(id)[0];
    auto& gz = t.gbuf(logits);
    for (size_t i = 0; i < gz.size(); ++i) {
      double e = (static_cast<int64_t>(i) == label) ? 1.0 : 0.0;
      gz[i] += g * ((*probs)[i] - e);
    }
  };
  return id;
}

}  // namespace smi
