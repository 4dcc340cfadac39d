#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "lfsys/euler/euler.hpp"

namespace lfsys {

const char* spectrum_tag_name(SpectrumTag t) {
  switch (t) {
    case SpectrumTag::MixedRealParts:
      return "MixedRealParts";
    case SpectrumTag::ImaginaryNonSkew:
      return "ImaginaryNonSkew";
    case SpectrumTag::Skew:
      return "Skew";
    case SpectrumTag::PureImaginaryResonant:
      return "PureImaginaryResonant";
    case SpectrumTag::Other:
      return "Other";
  }
  return "?";
}

namespace {

constexpr int kMaxRelation = 8;

// Smallest-norm nonzero k in [-8, 8]^m with |k . w| <= tol * max(w).
std::vector<int> integer_relation(const std::vector<double>& w, double tol) {
  const std::size_t m = w.size();
  if (m < 2) return {};
  const double scale = *std::max_element(w.begin(), w.end());
  std::vector<int> k(m, -kMaxRelation);
  std::vector<int> best;
  int best_norm = 0;
  for (;;) {
    bool zero = true;
    double dot = 0.0;
    int norm = 0;
    for (std::size_t i = 0; i < m; ++i) {
      dot += k[i] * w[i];
      norm += std::abs(k[i]);
      zero = zero && k[i] == 0;
    }
    if (!zero && std::abs(dot) <= tol * scale && (best.empty() || norm < best_norm)) {
      best = k;
      best_norm = norm;
    }
    std::size_t i = 0;
    while (i < m && k[i] == kMaxRelation) k[i++] = -kMaxRelation;
    if (i == m) break;
    ++k[i];
  }
  return best;
}

}  // namespace

SpectrumClass classify_linear_field(const Matrix& f, double zero_tol) {
  SpectrumClass out;
  out.eigenvalues = sorted_eigenvalues(f);
  bool pos = false;
  bool neg = false;
  bool imaginary = true;
  for (const auto& l : out.eigenvalues) {
    pos = pos || l.real() > zero_tol;
    neg = neg || l.real() < -zero_tol;
    imaginary = imaginary && std::abs(l.real()) <= zero_tol;
  }
  if (pos && neg) {
    out.tag = SpectrumTag::MixedRealParts;
    return out;
  }
  if ((f + f.transpose()).cwiseAbs().maxCoeff() == 0.0) {
    out.tag = SpectrumTag::Skew;
    return out;
  }
  if (!imaginary) {
    out.tag = SpectrumTag::Other;
    return out;
  }
  const auto& ev = out.eigenvalues;
  double scale = 1.0;
  for (const auto& l : ev) scale = std::max(scale, std::abs(l));
  for (std::size_t i = 0; i < ev.size(); ++i)
    for (std::size_t j = i + 1; j < ev.size(); ++j)
      if (std::abs(ev[i] - ev[j]) <= zero_tol * scale) {
        out.tag = SpectrumTag::PureImaginaryResonant;
        return out;
      }
  std::vector<double> freq;
  for (const auto& l : ev)
    if (l.imag() > zero_tol) freq.push_back(l.imag());
  out.resonance = integer_relation(freq, zero_tol);
  out.tag = out.resonance.empty() ? SpectrumTag::ImaginaryNonSkew
                                  : SpectrumTag::PureImaginaryResonant;
  return out;
}

}  // namespace lfsys
