#include "elfs/span_program.hpp"

#include <algorithm>
#include <optional>
#include <cmath>
#include <random>
#include <sstream>

#include "elfs/edge_space.hpp"
#include "elfs/errors.hpp"
#include "elfs/rng.hpp"

namespace elfs {

namespace {

constexpr double kIdentityTol = 1e-8;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

CMat hcat(const std::vector<CMat>& parts, int rows) {
  Eigen::Index cols = 0;
  for (const CMat& m : parts) cols += m.cols();
  CMat out(rows, cols);
  Eigen::Index at = 0;
  for (const CMat& m : parts) {
    out.middleCols(at, m.cols()) = m;
    at += m.cols();
  }
  return out;
}

// Orthonormal basis of the column span; h x 0 when the span is trivial.
CMat span_basis(const CMat& cols, int rows) {
  if (cols.cols() == 0 || cols.norm() < kAbsoluteCut) return CMat(rows, 0);
  return range_basis(cols);
}

CMat span_projector(const CMat& cols, int rows) {
  const CMat b = span_basis(cols, rows);
  return b * b.adjoint();
}

}  // namespace

SpanProgram::SpanProgram(CMat a, CVec tau, std::vector<std::vector<CMat>> blocks, CMat true_basis,
                         CMat false_basis)
    : a_(std::move(a)), tau_original_(std::move(tau)), blocks_(std::move(blocks)),
      true_basis_(std::move(true_basis)), false_basis_(std::move(false_basis)) {
  const int h = input_dim();
  if (h == 0 || target_dim() == 0) throw ValidationError("span program needs nonempty H and V");
  if (tau_original_.size() != target_dim()) {
    throw ValidationError("target vector has dimension " + std::to_string(tau_original_.size()) +
                          ", expected " + std::to_string(target_dim()));
  }
  if (true_basis_.rows() == 0 && true_basis_.cols() == 0) true_basis_ = CMat(h, 0);
  if (false_basis_.rows() == 0 && false_basis_.cols() == 0) false_basis_ = CMat(h, 0);
  if (true_basis_.rows() != h || false_basis_.rows() != h) {
    throw ValidationError("H_true / H_false bases must have " + std::to_string(h) + " rows");
  }

  // H_j is the sum of its blocks; the H_j, H_true and H_false must split H orthogonally.
  std::vector<CMat> parts;
  for (std::size_t j = 0; j < blocks_.size(); ++j) {
    if (blocks_[j].empty()) throw ValidationError("variable " + std::to_string(j) + " has no blocks");
    for (CMat& b : blocks_[j]) {
      if (b.rows() == 0 && b.cols() == 0) b = CMat(h, 0);
      if (b.rows() != h) throw ValidationError("block of variable " + std::to_string(j) + " has wrong row count");
    }
    parts.push_back(span_basis(hcat(blocks_[j], h), h));
  }
  parts.push_back(span_basis(true_basis_, h));
  parts.push_back(span_basis(false_basis_, h));
  Eigen::Index total = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    total += parts[i].cols();
    for (std::size_t k = i + 1; k < parts.size(); ++k) {
      if (parts[i].cols() && parts[k].cols() && (parts[i].adjoint() * parts[k]).norm() > 1e-10) {
        throw ValidationError("input subspaces are not mutually orthogonal");
      }
    }
  }
  if (total != h) {
    throw ValidationError("input subspaces span dimension " + std::to_string(total) + " of " + std::to_string(h));
  }

  const CMat a_pinv = pinv(a_);
  const CVec raw = a_pinv * tau_original_;
  if ((a_ * raw - tau_original_).norm() > 1e-9 * std::max(1.0, tau_original_.norm())) {
    throw ValidationError("target vector is not in the image of A");
  }
  if (raw.norm() < kAbsoluteCut) throw ValidationError("target vector is zero");
  tau_ = tau_original_ / raw.norm();
  w0_ = raw / raw.norm();

  const CMat ker = kernel_basis(a_);
  t_proj_ = w0_ * w0_.adjoint();
  if (ker.cols() > 0) t_proj_ += ker * ker.adjoint();
}

void SpanProgram::check_input(const std::vector<int>& x) const {
  if (static_cast<int>(x.size()) != num_variables()) {
    throw ValidationError("input has " + std::to_string(x.size()) + " symbols, expected " +
                          std::to_string(num_variables()));
  }
  for (int j = 0; j < num_variables(); ++j) {
    if (x[j] < 0 || x[j] >= alphabet(j)) {
      throw ValidationError("symbol " + std::to_string(x[j]) + " out of range for variable " + std::to_string(j));
    }
  }
}

CMat SpanProgram::available_projector(const std::vector<int>& x) const {
  check_input(x);
  std::vector<CMat> parts{true_basis_};
  for (int j = 0; j < num_variables(); ++j) parts.push_back(blocks_[j][x[j]]);
  return span_projector(hcat(parts, input_dim()), input_dim());
}

PositiveWitness positive_witness(const SpanProgram& p, const std::vector<int>& x) {
  const int h = p.input_dim();
  const CMat avail = p.available_projector(x);
  const CMat basis = span_basis(avail, h);
  CVec w = CVec::Zero(h);
  if (basis.cols() > 0) w = basis * (pinv(CMat(p.a() * basis)) * p.target());
  const double residual = (p.a() * w - p.target()).norm();
  if (residual > 1e-9 * std::max(1.0, p.target().norm())) {
    throw ValidationError("negative input: A w = tau has no solution in H(x), residual " + fmt(residual));
  }
  PositiveWitness out;
  out.witness = w;
  out.size = w.squaredNorm();
  const CMat q = invariant_projector(CMat::Identity(h, h) - p.t_projector(), CMat::Identity(h, h) - avail);
  out.q_overlap_sq = (q * p.w0()).squaredNorm();
  out.identity_gap = std::abs(out.q_overlap_sq * out.size - 1.0);
  if (out.identity_gap > 1e-9) {
    throw ToleranceError("||P_Q w0||^2 w_+ differs from 1 by " + fmt(out.identity_gap));
  }
  return out;
}

NegativeWitness negative_witness(const SpanProgram& p, const std::vector<int>& x) {
  positive_witness(p, x);  // rejects negative inputs
  const int v = p.target_dim();
  const CVec& tau = p.target();
  const CMat adj = p.a().adjoint();
  const CMat m = p.available_projector(x) * adj;

  // omega = omega0 + K t with K an orthonormal basis of tau's orthogonal complement.
  CVec omega = tau / tau.squaredNorm();
  if (v > 1) {
    const CMat k = kernel_basis(CMat(tau.adjoint()));
    const CMat mk = m * k;
    omega += k * (-(pinv(mk) * (m * omega)));
    // Second stage over the inner minimizers omega + K Z s.
    const CMat z = kernel_basis(mk);
    if (z.cols() > 0) {
      const CMat kz = k * z;
      omega += kz * (-(pinv(CMat(adj * kz)) * (adj * omega)));
    }
  }
  NegativeWitness out;
  out.omega = omega;
  out.error = (m * omega).squaredNorm();
  out.size = (adj * omega).squaredNorm();
  return out;
}

PseudoinverseReport pseudoinverse_identity(const SpanProgram& p, const std::vector<int>& x) {
  const int h = p.input_dim();
  const CMat id = CMat::Identity(h, h);
  const CMat t_perp = id - p.t_projector();
  const CMat avail = p.available_projector(x);
  PseudoinverseReport out;
  out.witness_side = negative_witness(p, x).size;
  out.pseudoinverse_side = 1.0 + (pinv_hermitian(CMat(t_perp * avail * t_perp)) * ((id - avail) * p.w0())).squaredNorm();
  out.gap = std::abs(out.witness_side - out.pseudoinverse_side);
  if (out.gap > kIdentityTol * std::max(1.0, out.witness_side)) {
    throw ToleranceError("negative witness size and pseudoinverse form differ by " + fmt(out.gap));
  }
  return out;
}

ProjectorInstance to_projector_instance(const SpanProgram& p, const std::vector<int>& x) {
  const int h = p.input_dim();
  const CMat id = CMat::Identity(h, h);
  ProjectorInstance out;
  out.pi = id - p.t_projector();
  out.delta = id - p.available_projector(x);
  out.psi = p.w0();
  const PositiveWitness pos = positive_witness(p, x);
  out.positive_size = pos.size;
  out.negative_size = pseudoinverse_identity(p, x).witness_side;
  out.invariant_overlap_sq = (invariant_projector(out.pi, out.delta) * out.psi).squaredNorm();

  const Transducer refl((2.0 * out.pi - id) * (2.0 * out.delta - id), projector_kernel_basis(out.pi),
                        "span program reflection");
  out.generic_complexity = generic_catalyst(refl, out.psi).complexity;
  out.effective_gap_complexity = effective_gap_transducer(out.pi, out.delta, out.psi, M_PI).rotation.complexity;

  const double scale = std::max(1.0, out.negative_size);
  if (std::abs(out.invariant_overlap_sq * out.positive_size - 1.0) > kIdentityTol) {
    throw ToleranceError("invariant overlap is not 1 / w_+");
  }
  for (double w : {out.generic_complexity, out.effective_gap_complexity}) {
    if (std::abs(w - (out.negative_size - 1.0)) > kIdentityTol * scale) {
      throw ToleranceError("transduction complexity " + fmt(w) + " differs from ~w_- - 1 = " +
                           fmt(out.negative_size - 1.0));
    }
  }
  return out;
}

namespace {

cplx json_scalar(const nlohmann::json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw ValidationError("expected a number or [re, im], got " + j.dump());
}

CVec json_vector(const nlohmann::json& j, int dim, const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) {
    throw ValidationError(what + " must be an array of length " + std::to_string(dim));
  }
  CVec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = json_scalar(j[i]);
  return v;
}

CMat json_columns(const nlohmann::json& j, int dim, const std::string& what) {
  if (j.is_null()) return CMat(dim, 0);
  if (!j.is_array()) throw ValidationError(what + " must be an array of vectors");
  CMat out(dim, static_cast<Eigen::Index>(j.size()));
  for (std::size_t c = 0; c < j.size(); ++c) out.col(c) = json_vector(j[c], dim, what);
  return out;
}

}  // namespace

SpanProgram span_program_from_json(const nlohmann::json& j) {
  try {
    const int h = j.at("dims").at("H").get<int>();
    const int v = j.at("dims").at("V").get<int>();
    if (h <= 0 || v <= 0) throw ValidationError("dims must be positive");
    const auto& rows = j.at("A");
    if (!rows.is_array() || static_cast<int>(rows.size()) != v) {
      throw ValidationError("A must have " + std::to_string(v) + " rows");
    }
    CMat a(v, h);
    for (int r = 0; r < v; ++r) a.row(r) = json_vector(rows[r], h, "row of A").transpose();
    const CVec tau = json_vector(j.at("tau"), v, "tau");

    std::vector<std::vector<CMat>> blocks;
    for (const auto& b : j.at("blocks")) {
      const int var = b.at("var").get<int>();
      const int value = b.at("value").get<int>();
      if (var < 0 || value < 0) throw ValidationError("block indices must be non-negative");
      if (static_cast<int>(blocks.size()) <= var) blocks.resize(var + 1);
      if (static_cast<int>(blocks[var].size()) <= value) blocks[var].resize(value + 1, CMat(h, 0));
      blocks[var][value] = json_columns(b.at("basis"), h, "block basis");
    }
    return SpanProgram(a, tau, blocks, json_columns(j.value("true", nlohmann::json()), h, "true basis"),
                       json_columns(j.value("false", nlohmann::json()), h, "false basis"));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed span program: ") + e.what());
  }
}

namespace span_fixtures {

SpanProgram or2() {
  CMat a(1, 2);
  a << 1.0, 1.0;
  CVec tau(1);
  tau << 1.0;
  const CMat id = CMat::Identity(2, 2);
  std::vector<std::vector<CMat>> blocks = {{CMat(2, 0), id.col(0)}, {CMat(2, 0), id.col(1)}};
  return SpanProgram(a, tau, blocks, CMat(2, 0), CMat(2, 0));
}

SpanProgram two_target() {
  CMat a(2, 3);
  a << 1.0, 0.0, 1.0,
       0.0, 1.0, 1.0;
  CVec tau(2);
  tau << 1.0, 0.0;
  const CMat id = CMat::Identity(3, 3);
  // H_1 = span{e1, e3} with H_{1,0} = span e3, H_{1,1} = span e1; H_2 = span e2.
  std::vector<std::vector<CMat>> blocks = {{id.col(2), id.col(0)}, {CMat(3, 0), id.col(1)}};
  return SpanProgram(a, tau, blocks, CMat(3, 0), CMat(3, 0));
}

namespace {

CMat gaussian(Rng& rng, int r, int c) {
  std::normal_distribution<double> n01;
  CMat m(r, c);
  for (int i = 0; i < r; ++i) {
    for (int k = 0; k < c; ++k) m(i, k) = cplx(n01(rng), n01(rng));
  }
  return m;
}

std::optional<RandomInstance> draw(Rng& rng, int max_v, int max_h) {
  const int v = std::uniform_int_distribution<int>(1, max_v)(rng);
  const int h = std::uniform_int_distribution<int>(std::max(v, 3), std::max(max_h, 3))(rng);
  const int nvars = std::uniform_int_distribution<int>(1, std::min(3, h - 1))(rng);
  const Eigen::HouseholderQR<CMat> qr(gaussian(rng, h, h));
  const CMat basis = qr.householderQ() * CMat::Identity(h, h);

  // Column counts: one H_true column at most, the rest shared by the variables and H_false.
  std::vector<int> owner(h);
  for (int c = 0; c < h; ++c) {
    owner[c] = c < nvars ? c : std::uniform_int_distribution<int>(0, nvars + 1)(rng);
  }
  std::vector<std::vector<CMat>> blocks(nvars);
  CMat true_cols(h, 0), false_cols(h, 0);
  auto append = [](CMat& m, const CVec& col) {
    m.conservativeResize(m.rows(), m.cols() + 1);
    m.col(m.cols() - 1) = col;
  };
  for (int j = 0; j < nvars; ++j) {
    std::vector<int> cols;
    for (int c = 0; c < h; ++c) {
      if (owner[c] == j) cols.push_back(c);
    }
    CMat b0(h, 0), b1(h, 0);
    for (int c : cols) {
      // Every column lands in at least one block; some in both.
      const int where = std::uniform_int_distribution<int>(0, 2)(rng);
      if (where != 1) append(b0, basis.col(c));
      if (where != 0) append(b1, basis.col(c));
    }
    blocks[j] = {b0, b1};
  }
  for (int c = 0; c < h; ++c) {
    if (owner[c] == nvars) append(true_cols, basis.col(c));
    if (owner[c] == nvars + 1) append(false_cols, basis.col(c));
  }

  const CMat a = gaussian(rng, v, h);
  const CVec tau = a * gaussian(rng, h, 1).col(0);
  std::vector<int> x(nvars);
  for (int& s : x) s = std::uniform_int_distribution<int>(0, 1)(rng);
  RandomInstance inst{SpanProgram(a, tau, blocks, true_cols, false_cols), x};
  try {
    const PositiveWitness pos = positive_witness(inst.program, x);
    if (pos.size > 1e6) return std::nullopt;
  } catch (const ValidationError&) {
    return std::nullopt;
  }
  return inst;
}

}  // namespace

RandomInstance random_instance(std::uint64_t seed, int max_v, int max_h) {
  if (max_v < 1 || max_h < max_v) throw ValidationError("random span program needs 1 <= max_v <= max_h");
  Rng rng = make_rng(seed, 0x5b);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    if (auto inst = draw(rng, max_v, max_h)) return *inst;
  }
  throw BudgetError("no positive random span program instance in 1000 draws");
}

}  // namespace span_fixtures

nlohmann::json to_json(const PositiveWitness& w) {
  return {{"w_plus", w.size}, {"q_overlap_sq", w.q_overlap_sq}, {"identity_gap", w.identity_gap}};
}

nlohmann::json to_json(const NegativeWitness& w) {
  return {{"e_minus", w.error}, {"w_minus_tilde", w.size}};
}

}  // namespace elfs
