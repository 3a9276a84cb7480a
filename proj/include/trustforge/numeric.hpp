// Copyright 2026 The TrustForge Authors
// SPDX-License-Identifier: Apache-2.0

// Scalar-generic numeric kernels shared by synthesis, features and topology.
// All functions accept any Eigen dense vector expression.

#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "trustforge/error.hpp"

namespace trustforge {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Least-squares slope of the line forced through the first sample:
/// b = sum_j j (s_j - s_0) / sum_j j^2 over j = 1..n-1.
template <typename Derived>
typename Derived::Scalar anchored_slope(const Eigen::DenseBase<Derived>& segment) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = segment.size();
  if (n < 2) throw ConfigError("anchored_slope: segment needs at least 2 samples");
  const Scalar anchor = segment(0);
  Scalar num(0);
  Scalar den(0);
  for (Eigen::Index j = 1; j < n; ++j) {
    const auto offset = static_cast<Scalar>(j);
    num += offset * (segment(j) - anchor);
    den += offset * offset;
  }
  return num / den;
}

/// Cosine basis C(i, k) = cos(pi/N (i + 1/2) k), so that a = C^T x.
template <typename Scalar = double>
Matrix<Scalar> dct_basis(Eigen::Index length, Eigen::Index num_coeffs) {
  if (num_coeffs > length) throw ConfigError("dct_basis: more coefficients than samples");
  Matrix<Scalar> basis(length, num_coeffs);
  const Scalar scale = std::numbers::pi_v<Scalar> / static_cast<Scalar>(length);
  for (Eigen::Index k = 0; k < num_coeffs; ++k)
    for (Eigen::Index i = 0; i < length; ++i)
      basis(i, k) = std::cos(scale * (static_cast<Scalar>(i) + Scalar(0.5)) * static_cast<Scalar>(k));
  return basis;
}

/// Unnormalized DCT-II coefficients a_0..a_{M-1}.
template <typename Derived>
Vector<typename Derived::Scalar> dct_coeffs(const Eigen::MatrixBase<Derived>& x,
                                            Eigen::Index num_coeffs) {
  using Scalar = typename Derived::Scalar;
  return dct_basis<Scalar>(x.size(), num_coeffs).transpose() * x;
}

/// Averages contiguous, equal-sized blocks of `coeffs`.
template <typename Derived>
Vector<typename Derived::Scalar> band_means(const Eigen::MatrixBase<Derived>& coeffs,
                                            Eigen::Index num_bands) {
  if (num_bands <= 0 || coeffs.size() % num_bands != 0)
    throw ConfigError("band_means: band count must divide the coefficient count");
  const Eigen::Index width = coeffs.size() / num_bands;
  Vector<typename Derived::Scalar> out(num_bands);
  for (Eigen::Index t = 0; t < num_bands; ++t) out(t) = coeffs.segment(t * width, width).mean();
  return out;
}

/// Pearson correlation; std::nullopt when either input is constant (the
/// coefficient is undefined) or fewer than two samples are given.
template <typename DerivedX, typename DerivedY>
std::optional<typename DerivedX::Scalar> pearson(const Eigen::MatrixBase<DerivedX>& x,
                                                 const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  if (x.size() != y.size()) throw ConfigError("pearson: length mismatch");
  if (x.size() < 2) return std::nullopt;
  if (x.maxCoeff() == x.minCoeff() || y.maxCoeff() == y.minCoeff()) return std::nullopt;
  const auto dx = (x.array() - x.mean()).eval();
  const auto dy = (y.array() - y.mean()).eval();
  const Scalar sxx = dx.square().sum();
  const Scalar syy = dy.square().sum();
  if (!(sxx > Scalar(0)) || !(syy > Scalar(0))) return std::nullopt;
  const Scalar r = (dx * dy).sum() / std::sqrt(sxx * syy);
  return std::clamp(r, Scalar(-1), Scalar(1));
}

/// Canberra distance with 0/0 terms taken as 0.
template <typename DerivedU, typename DerivedV>
typename DerivedU::Scalar canberra(const Eigen::MatrixBase<DerivedU>& u,
                                   const Eigen::MatrixBase<DerivedV>& v) {
  using Scalar = typename DerivedU::Scalar;
  if (u.size() != v.size()) throw ConfigError("canberra: dimension mismatch");
  Scalar d(0);
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const Scalar den = std::abs(u(i)) + std::abs(v(i));
    if (den > Scalar(0)) d += std::abs(u(i) - v(i)) / den;
  }
  return d;
}

}  // namespace trustforge
