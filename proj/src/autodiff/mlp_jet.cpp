#include "harvest/autodiff/mlp_jet.hpp"

#include <string>

#include "harvest/common/error.hpp"

namespace harvest::autodiff {

namespace {

// Vectorized tanh: Eigen evaluates double tanh one element at a time through
// libm. Odd Taylor series near zero, exp form elsewhere; relative error ~1e-15.
// `t` is scratch of the same shape; nothing is allocated once shapes settle.
template <typename In, typename Out>
void batched_tanh(const In& z, Out&& out, Eigen::ArrayXXd& t) {
  t = (-2.0 * z.abs()).exp();
  const auto z2 = z.square();
  const auto series = z * (1.0 + z2 * (-1.0 / 3.0 + z2 * (2.0 / 15.0 + z2 * (-17.0 / 315.0 + z2 * (62.0 / 2835.0)))));
  const auto tail = (1.0 - t) / (1.0 + t);
  out = (z.abs() < 0.03).select(series, (z < 0.0).select(-tail, tail));
}

}  // namespace

JetLayout JetLayout::for_components(ComponentMask mask, int input_dim) {
  const bool need_x =
      mask & (bit(JetComponent::kUx) | bit(JetComponent::kUxx) | bit(JetComponent::kUxt));
  const bool need_t =
      mask & (bit(JetComponent::kUt) | bit(JetComponent::kUtt) | bit(JetComponent::kUxt));
  if (need_t && input_dim < 2) {
    throw DimensionError("t-derivatives requested from a network with one input");
  }
  JetLayout layout;
  int ix = -1;
  int it = -1;
  if (need_x) {
    ix = static_cast<int>(layout.directions.size());
    layout.directions.push_back(Eigen::VectorXd::Unit(input_dim, 0));
  }
  if (need_t) {
    it = static_cast<int>(layout.directions.size());
    layout.directions.push_back(Eigen::VectorXd::Unit(input_dim, 1));
  }
  const int ndir = static_cast<int>(layout.directions.size());
  if (mask & bit(JetComponent::kUx)) layout.block[static_cast<int>(JetComponent::kUx)] = 1 + ix;
  if (mask & bit(JetComponent::kUt)) layout.block[static_cast<int>(JetComponent::kUt)] = 1 + it;
  auto add_pair = [&](JetComponent c, int i, int j) {
    if (!(mask & bit(c))) return;
    layout.block[static_cast<int>(c)] = 1 + ndir + static_cast<int>(layout.pairs.size());
    layout.pairs.push_back({i, j});
  };
  add_pair(JetComponent::kUxx, ix, ix);
  add_pair(JetComponent::kUxt, ix, it);
  add_pair(JetComponent::kUtt, it, it);
  return layout;
}

JetLayout JetLayout::hyperdual(const Eigen::VectorXd& dir1, const Eigen::VectorXd& dir2) {
  JetLayout layout;
  layout.directions = {dir1, dir2};
  layout.pairs = {{0, 1}};
  layout.block = {0, -1, -1, -1, -1, -1};
  return layout;
}

BatchedJet::BatchedJet(nn::MlpSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const auto L = static_cast<std::size_t>(spec_.layer_count());
  inputs_.resize(L + 1);
  pre_.resize(L);
  s1_.resize(L);
  s2_.resize(L);
  s3_.resize(L);
  grad_h_.resize(L + 1);
  grad_z_.resize(L);
}

const Eigen::MatrixXd& BatchedJet::forward(std::span<const double> params,
                                           const Eigen::MatrixXd& x, const JetLayout& layout,
                                           const InputMap& map) {
  const int in = spec_.input_dim();
  if (x.rows() != in) {
    throw DimensionError("batched input has " + std::to_string(x.rows()) + " rows, network expects " +
                         std::to_string(in));
  }
  if (params.size() != spec_.param_count()) {
    throw DimensionError("parameter vector length " + std::to_string(params.size()) +
                         " does not match network (" + std::to_string(spec_.param_count()) + ")");
  }
  for (const auto& d : layout.directions) {
    if (d.size() != in) throw DimensionError("seed direction length does not match input width");
  }
  if (!map.identity() && (static_cast<int>(map.offset.size()) != in ||
                          static_cast<int>(map.scale.size()) != in)) {
    throw DimensionError("input map width does not match network");
  }
  layout_ = layout;
  map_ = map;
  theta_ = Eigen::Map<const Eigen::VectorXd>(params.data(), static_cast<Eigen::Index>(params.size()));
  const int N = static_cast<int>(x.cols());
  points_ = N;
  const int C = layout_.block_count();
  const int ndir = static_cast<int>(layout_.directions.size());

  Eigen::MatrixXd& h0 = inputs_[0];
  h0.setZero(in, static_cast<Eigen::Index>(N) * C);
  h0.leftCols(N) = x;
  for (int d = 0; d < ndir; ++d) {
    Eigen::VectorXd dir = layout_.directions[d];
    if (!map_.identity()) {
      for (int r = 0; r < in; ++r) dir[r] /= map_.scale[r];
    }
    h0.middleCols(static_cast<Eigen::Index>(1 + d) * N, N).colwise() = dir;
  }
  if (!map_.identity()) {
    for (int r = 0; r < in; ++r) {
      h0.row(r).head(N) = (h0.row(r).head(N).array() - map_.offset[r]) / map_.scale[r];
    }
  }

  for (int l = 0; l < spec_.layer_count(); ++l) {
    const int out = spec_.fan_out(l);
    Eigen::Map<const Eigen::MatrixXd> W(theta_.data() + spec_.weight_offset(l), out, spec_.fan_in(l));
    Eigen::Map<const Eigen::VectorXd> b(theta_.data() + spec_.bias_offset(l), out);
    Eigen::MatrixXd& Z = pre_[l];
    Z.noalias() = W * inputs_[l];
    Z.leftCols(N).colwise() += b;
    Eigen::MatrixXd& H = inputs_[l + 1];
    const nn::Activation act = spec_.activations[l];
    if (act == nn::Activation::kLinear) {
      H = Z;
      continue;
    }
    auto z0 = Z.leftCols(N).array();
    H.resize(out, static_cast<Eigen::Index>(N) * C);
    auto h = H.leftCols(N).array();
    Eigen::ArrayXXd& s1 = s1_[l];
    Eigen::ArrayXXd& s2 = s2_[l];
    Eigen::ArrayXXd& s3 = s3_[l];
    // s2 is read only with tangent blocks, s3 only with pair blocks.
    const bool need_s2 = ndir > 0;
    const bool need_s3 = !layout_.pairs.empty();
    if (act == nn::Activation::kTanh) {
      batched_tanh(z0, h, tanh_scratch_);
      s1 = 1.0 - h.square();
      if (need_s2) s2 = -2.0 * h * s1;
      if (need_s3) s3 = -2.0 * (s1.square() + h * s2);
    } else {
      h = z0.unaryExpr([](double v) { return softplus(v); });
      s1 = z0.unaryExpr([](double v) { return sigmoid(v); });
      if (need_s2) s2 = s1 * (1.0 - s1);
      if (need_s3) s3 = s2 * (1.0 - 2.0 * s1);
    }
    auto blk = [N](Eigen::MatrixXd& m, int b) { return m.middleCols(static_cast<Eigen::Index>(b) * N, N).array(); };
    for (int d = 0; d < ndir; ++d) blk(H, 1 + d) = s1 * blk(Z, 1 + d);
    for (std::size_t p = 0; p < layout_.pairs.size(); ++p) {
      const int bp = 1 + ndir + static_cast<int>(p);
      const int bi = 1 + layout_.pairs[p][0];
      const int bj = 1 + layout_.pairs[p][1];
      blk(H, bp) = s2 * blk(Z, bi) * blk(Z, bj) + s1 * blk(Z, bp);
    }
  }
  return inputs_.back();
}

void BatchedJet::backward(std::span<const double> params, const Eigen::MatrixXd& grad_output,
                          std::span<double> grad_params, Eigen::MatrixXd* grad_input) {
  const int N = points_;
  const int C = layout_.block_count();
  const int ndir = static_cast<int>(layout_.directions.size());
  if (grad_output.rows() != spec_.output_dim() ||
      grad_output.cols() != static_cast<Eigen::Index>(N) * C) {
    throw DimensionError("output gradient shape does not match the last forward pass");
  }
  if (grad_params.size() != spec_.param_count()) {
    throw DimensionError("gradient buffer length does not match network");
  }
  auto blk = [N](auto& m, int b) { return m.middleCols(static_cast<Eigen::Index>(b) * N, N).array(); };
  theta_ = Eigen::Map<const Eigen::VectorXd>(params.data(), static_cast<Eigen::Index>(params.size()));
  dtheta_.setZero(static_cast<Eigen::Index>(grad_params.size()));

  const int L = spec_.layer_count();
  for (int l = L - 1; l >= 0; --l) {
    const int out = spec_.fan_out(l);
    const int in = spec_.fan_in(l);
    const nn::Activation act = spec_.activations[l];
    const Eigen::MatrixXd& G = l == L - 1 ? grad_output : grad_h_[l + 1];
    Eigen::MatrixXd& GZ = grad_z_[l];
    if (act == nn::Activation::kLinear) {
      GZ = G;
    } else {
      const Eigen::MatrixXd& Z = pre_[l];
      const Eigen::ArrayXXd& s1 = s1_[l];
      const Eigen::ArrayXXd& s2 = s2_[l];
      const Eigen::ArrayXXd& s3 = s3_[l];
      GZ.resize(out, static_cast<Eigen::Index>(N) * C);
      blk(GZ, 0) = s1 * blk(G, 0);
      for (int d = 0; d < ndir; ++d) {
        blk(GZ, 1 + d) = s1 * blk(G, 1 + d);
        blk(GZ, 0) += s2 * blk(G, 1 + d) * blk(Z, 1 + d);
      }
      for (std::size_t p = 0; p < layout_.pairs.size(); ++p) {
        const int bp = 1 + ndir + static_cast<int>(p);
        const int bi = 1 + layout_.pairs[p][0];
        const int bj = 1 + layout_.pairs[p][1];
        blk(GZ, bp) = s1 * blk(G, bp);
        blk(GZ, bi) += s2 * blk(G, bp) * blk(Z, bj);
        blk(GZ, bj) += s2 * blk(G, bp) * blk(Z, bi);
        blk(GZ, 0) += s3 * blk(G, bp) * blk(Z, bi) * blk(Z, bj) + s2 * blk(G, bp) * blk(Z, bp);
      }
    }
    Eigen::Map<Eigen::MatrixXd> gW(dtheta_.data() + spec_.weight_offset(l), out, in);
    Eigen::Map<Eigen::VectorXd> gb(dtheta_.data() + spec_.bias_offset(l), out);
    gW.noalias() += GZ * inputs_[l].transpose();
    gb += GZ.leftCols(N).rowwise().sum();
    if (l > 0 || grad_input != nullptr) {
      Eigen::Map<const Eigen::MatrixXd> W(theta_.data() + spec_.weight_offset(l), out, in);
      grad_h_[l].noalias() = W.transpose() * GZ;
    }
  }
  for (std::size_t i = 0; i < grad_params.size(); ++i) grad_params[i] += dtheta_[static_cast<Eigen::Index>(i)];
  if (grad_input != nullptr) {
    *grad_input = grad_h_[0].leftCols(N);
    if (!map_.identity()) {
      for (int r = 0; r < spec_.input_dim(); ++r) grad_input->row(r) /= map_.scale[r];
    }
  }
}

}  // namespace harvest::autodiff
