#pragma once

// Seeded generators of invertible sectorial test operators with known structure.
//
// Random stream: SplitMix64 (Steele, Lea, Flood 2014) on a 64-bit counter. Uniform doubles
// take the top 53 bits; normals use one Box-Muller draw per call. Independent streams for
// the parts of an instance are derived as SplitMix64(seed ^ (stream * 0x9e3779b97f4a7c15)).

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>

#include "hk/cmatrix.hpp"
#include "hk/error.hpp"

namespace hk {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double normal() {
    const double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Complex complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return SplitMix64(seed ^ (stream * 0x9e3779b97f4a7c15ULL)).next();
}

enum class InstanceClass { HermitianDiag, NormalSector, SimilarityPerturbed, JordanBlock };

inline std::string to_string(InstanceClass c) {
  switch (c) {
    case InstanceClass::HermitianDiag: return "HermitianDiag";
    case InstanceClass::NormalSector: return "NormalSector";
    case InstanceClass::SimilarityPerturbed: return "SimilarityPerturbed";
    case InstanceClass::JordanBlock: return "JordanBlock";
  }
  return "Unknown";
}

inline InstanceClass instance_class_from_string(const std::string& s) {
  if (s == "HermitianDiag") return InstanceClass::HermitianDiag;
  if (s == "NormalSector") return InstanceClass::NormalSector;
  if (s == "SimilarityPerturbed") return InstanceClass::SimilarityPerturbed;
  if (s == "JordanBlock") return InstanceClass::JordanBlock;
  throw Error(Errc::Parse, "unknown instance class '" + s + "'");
}

/// How an operator was built: A = S diag(D) S^{-1}, or A = lambda I + N for Jordan blocks.
struct OperatorStructure {
  InstanceClass cls = InstanceClass::HermitianDiag;
  CMatrix similarity;            // S; empty for Jordan blocks
  Eigen::VectorXd diagonal;      // D
  double jordan_lambda = 0.0;
  double nilpotent_norm = 0.0;   // ||N||_2
  int dim = 0;
};

struct InstanceSpec {
  std::uint64_t seed = 0;
  InstanceClass cls = InstanceClass::HermitianDiag;
  int n1 = 4;
  int n2 = 4;
  double lambda_min = 1.0;
  double lambda_max = 4.0;
  double cond_target = 10.0;

  void validate() const {
    if (n1 < 1 || n2 < 1) throw Error(Errc::InvalidArgument, "dimensions must be >= 1");
    if (!(lambda_min > 0.0) || !(lambda_max >= lambda_min))
      throw Error(Errc::InvalidArgument, "spectrum bounds need 0 < lambda_min <= lambda_max");
    if (!(cond_target >= 1.0)) throw Error(Errc::InvalidArgument, "condition target must be >= 1");
  }
};

struct GeneratedOperator {
  CMatrix matrix;
  OperatorStructure structure;
};

/// Haar-like unitary: QR of a complex Gaussian matrix with the phases of R's diagonal removed.
inline CMatrix random_unitary(int n, SplitMix64& rng) {
  CMatrix z(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) z(i, j) = rng.complex_normal();
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

/// Operator of size n drawn from stream `stream` of spec.seed.
inline GeneratedOperator gen_operator(const InstanceSpec& spec, int n, std::uint64_t stream = 0) {
  spec.validate();
  if (n < 1) throw Error(Errc::InvalidArgument, "dimension must be >= 1");
  SplitMix64 rng(derive_seed(spec.seed, stream));
  const auto draw = [&] { return spec.lambda_min + (spec.lambda_max - spec.lambda_min) * rng.uniform(); };

  GeneratedOperator out;
  OperatorStructure& st = out.structure;
  st.cls = spec.cls;
  st.dim = n;
  if (spec.cls == InstanceClass::JordanBlock) {
    st.jordan_lambda = draw();
    st.nilpotent_norm = n > 1 ? 1.0 : 0.0;
    out.matrix = st.jordan_lambda * identity(n);
    for (int i = 0; i + 1 < n; ++i) out.matrix(i, i + 1) = 1.0;
    return out;
  }

  st.diagonal.resize(n);
  for (int i = 0; i < n; ++i) st.diagonal(i) = draw();
  const CMatrix d = st.diagonal.cast<Complex>().asDiagonal();

  switch (spec.cls) {
    case InstanceClass::HermitianDiag:
      st.similarity = identity(n);
      out.matrix = d;
      break;
    case InstanceClass::NormalSector: {
      st.similarity = random_unitary(n, rng);
      out.matrix = st.similarity * d * st.similarity.adjoint();
      out.matrix = 0.5 * (out.matrix + out.matrix.adjoint()).eval();
      break;
    }
    case InstanceClass::SimilarityPerturbed: {
      const CMatrix u1 = random_unitary(n, rng);
      const CMatrix u2 = random_unitary(n, rng);
      Eigen::VectorXd g(n);
      for (int i = 0; i < n; ++i)
        g(i) = n > 1 ? std::pow(spec.cond_target, static_cast<double>(i) / (n - 1)) : 1.0;
      st.similarity = u1 * g.cast<Complex>().asDiagonal() * u2;
      out.matrix = st.similarity * d * inverse(st.similarity);
      break;
    }
    case InstanceClass::JordanBlock: break;
  }
  return out;
}

/// Random complex n2 x n1 matrix rescaled to spectral norm `norm_target`.
inline CMatrix gen_t(std::uint64_t seed, int n2, int n1, double norm_target) {
  if (!(norm_target > 0.0)) throw Error(Errc::InvalidArgument, "norm target must be positive");
  if (n1 < 1 || n2 < 1) throw Error(Errc::InvalidArgument, "dimensions must be >= 1");
  SplitMix64 rng(seed);
  CMatrix t(n2, n1);
  for (int j = 0; j < n1; ++j)
    for (int i = 0; i < n2; ++i) t(i, j) = rng.complex_normal();
  return t * (norm_target / spectral_norm(t));
}

/// A (n1 x n1), B (n2 x n2) and T (n2 x n1) with the structure of A and B recorded.
struct InstanceBundle {
  CMatrix a, b, t;
  std::optional<OperatorStructure> structure_a, structure_b;
  std::optional<InstanceSpec> spec;
};

inline InstanceBundle gen_instance(const InstanceSpec& spec, double norm_t = 1.0) {
  GeneratedOperator ga = gen_operator(spec, spec.n1, 1);
  GeneratedOperator gb = gen_operator(spec, spec.n2, 2);
  InstanceBundle out;
  out.a = std::move(ga.matrix);
  out.b = std::move(gb.matrix);
  out.t = gen_t(derive_seed(spec.seed, 3), spec.n2, spec.n1, norm_t);
  out.structure_a = std::move(ga.structure);
  out.structure_b = std::move(gb.structure);
  out.spec = spec;
  return out;
}

}  // namespace hk
