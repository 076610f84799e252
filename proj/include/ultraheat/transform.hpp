#pragma once

// Fourier transform between the position and frequency sides of a lattice.
//
//   forward: (F f)(xi) = p^(-mN) sum_x chi_p(-xi . x) f(x)
//   inverse: (F^-1 g)(x) = p^(-MN) sum_xi chi_p(xi . x) g(xi)
//
// With x = p^(-M) k and xi = p^(-m) l the phase of chi_p(xi . x) is
// (k . l mod p^(M+m)) / p^(M+m), so both directions are DFTs over
// (Z / p^(M+m))^N with volume factors.

#include <complex>
#include <memory>
#include <vector>

#include "ultraheat/lattice.hpp"

namespace ultraheat {

class TransformPlan
{
public:
    explicit TransformPlan(LatticePtr lattice);

    /// Shared plan for a lattice; plans are cached by lattice parameters.
    static std::shared_ptr<const TransformPlan> for_lattice(const LatticePtr& lattice);

    const Lattice& lattice() const { return *lattice_; }

    /// root(j) = exp(-2 pi i j / p^(M+m)).
    std::complex<double> root(std::int64_t j) const;

    /// Radix-p transform; direction follows the field's side.
    LatticeField fast(const LatticeField& f) const;
    /// Direct character sum, O(S^2). Kept as the reference path.
    LatticeField naive(const LatticeField& f) const;

private:
    void require_match(const LatticeField& f) const;
    void fft_line(std::complex<double>* data, std::vector<std::complex<double>>& scratch, bool inverse) const;

    LatticePtr lattice_;
    std::vector<std::complex<double>> roots_;
    std::vector<std::size_t> digit_reversal_;
};

/// Position -> frequency (fast path).
LatticeField forward(const LatticeField& f);
/// Frequency -> position (fast path).
LatticeField inverse(const LatticeField& g);

LatticeField fast_transform(const TransformPlan& plan, const LatticeField& f);
LatticeField naive_transform(const LatticeField& f);

/// Group convolution of two position fields: inverse(forward(f) * forward(g)).
LatticeField convolve(const LatticeField& f, const LatticeField& g);

/// inverse(multiplier * forward(f)) for a frequency-side multiplier.
LatticeField apply_multiplier(const LatticeField& f, const LatticeField& multiplier);

} // namespace ultraheat
