#pragma once

// Ball-coset discretization of Q_p^N.
//
// A Lattice with parameters (p, N, M, m) enumerates B_M^N / B_{-m}^N. Cell
// index i carries integer coordinates k in {0, ..., p^(M+m) - 1}^N, ordered
// lexicographically (first coordinate most significant). The position-side
// representative of the cell is p^(-M) k; the frequency-side (dual) lattice
// reuses the same index set with representatives p^(-m) k.

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "ultraheat/padic.hpp"

namespace ultraheat {

enum class Side { position, frequency };

const char* to_string(Side side);

struct LatticeParams
{
    std::int64_t p = 2;
    int dimension = 1;
    int support = 1;    // M
    int resolution = 1; // m

    friend bool operator==(const LatticeParams&, const LatticeParams&) = default;
};

class Lattice
{
public:
    static constexpr std::size_t default_cell_cap = std::size_t{1} << 24;

    explicit Lattice(const LatticeParams& params, std::size_t cell_cap = default_cell_cap);

    static std::shared_ptr<const Lattice> make(const LatticeParams& params,
                                               std::size_t cell_cap = default_cell_cap);

    const LatticeParams& params() const { return params_; }
    std::int64_t prime() const { return params_.p; }
    int dimension() const { return params_.dimension; }
    int support_exponent() const { return params_.support; }
    int resolution_exponent() const { return params_.resolution; }

    /// Number of base-p digits per coordinate, M + m.
    int digits() const { return params_.support + params_.resolution; }
    /// Per-axis group order p^(M+m).
    std::int64_t axis_length() const { return axis_length_; }
    std::size_t size() const { return size_; }

    /// Integer coordinates k of a cell.
    std::vector<std::int64_t> coords(std::size_t index) const;
    void coords(std::size_t index, std::span<std::int64_t> out) const;
    std::size_t index_of(std::span<const std::int64_t> coords) const;

    /// min_i v_p(k_i), equal to digits() at the origin cell.
    int depth(std::size_t index) const { return depth_[index]; }

    /// Exponent gamma with ||x||_p = p^gamma on the given side; nullopt at the
    /// origin cell, which stands for the whole ball B_{-m} (position) or
    /// B_{-M} (frequency).
    std::optional<int> norm_exponent(std::size_t index, Side side) const;

    /// Smallest and largest shell exponents present on a side.
    int min_shell(Side side) const;
    int max_shell(Side side) const;

    std::vector<std::size_t> shell(int gamma, Side side) const;
    /// p^(N(gamma+r)) - p^(N(gamma-1+r)) where r is the side's resolution exponent.
    std::size_t shell_count(int gamma, Side side) const;

    /// Exponent e with cell volume p^e on a side: -mN or -MN.
    long cell_volume_exponent(Side side) const;
    double cell_volume(Side side) const;

    std::size_t negate_index(std::size_t index) const;

    PAdicVector representative(std::size_t index, Side side) const;

    /// Base-p digits of each coordinate, most significant first, coordinates
    /// separated by ':'.
    std::string digit_string(std::size_t index) const;

private:
    LatticeParams params_;
    std::int64_t axis_length_;
    std::size_t size_;
    std::vector<std::uint8_t> axis_valuation_; // v_p(k) per axis value, digits() for 0
    std::vector<std::uint8_t> depth_;
};

using LatticePtr = std::shared_ptr<const Lattice>;

/// Values on every cell of a lattice, on one side.
class LatticeField
{
public:
    LatticeField(LatticePtr lattice, Side side);
    LatticeField(LatticePtr lattice, Side side, std::vector<std::complex<double>> values);

    const Lattice& lattice() const { return *lattice_; }
    const LatticePtr& lattice_ptr() const { return lattice_; }
    Side side() const { return side_; }
    std::size_t size() const { return values_.size(); }

    std::complex<double>& operator[](std::size_t i) { return values_[i]; }
    const std::complex<double>& operator[](std::size_t i) const { return values_[i]; }
    std::vector<std::complex<double>>& values() { return values_; }
    const std::vector<std::complex<double>>& values() const { return values_; }

    double max_abs() const;
    double max_abs_imag() const;
    double min_real() const;
    std::vector<double> real_values() const;

    LatticeField& operator+=(const LatticeField& other);
    LatticeField& operator-=(const LatticeField& other);
    LatticeField& operator*=(const LatticeField& other);
    LatticeField& operator*=(std::complex<double> scale);

    void write_csv(std::ostream& out) const;

private:
    void require_compatible(const LatticeField& other) const;

    LatticePtr lattice_;
    Side side_;
    std::vector<std::complex<double>> values_;
};

LatticeField operator+(LatticeField a, const LatticeField& b);
LatticeField operator-(LatticeField a, const LatticeField& b);
LatticeField operator*(LatticeField a, const LatticeField& b);
LatticeField operator*(std::complex<double> s, LatticeField a);

/// Max-norm of a - b.
double max_abs_diff(const LatticeField& a, const LatticeField& b);

/// View of one cell handed to sampling callables.
struct Cell
{
    const Lattice& lattice;
    Side side;
    std::size_t index;
    std::span<const std::int64_t> coords;
    std::optional<int> norm_exponent;

    PAdicVector representative() const { return lattice.representative(index, side); }
};

/// Evaluates f at each cell in index order.
LatticeField sample_function(const LatticePtr& lattice, Side side,
                             const std::function<std::complex<double>(const Cell&)>& f);

/// Evaluates a radial function g(gamma); the origin cell receives g(nullopt).
LatticeField sample_radial(const LatticePtr& lattice, Side side,
                           const std::function<double(std::optional<int>)>& g);

/// Indicator of the ball ||x||_p <= p^gamma.
LatticeField ball_indicator(const LatticePtr& lattice, Side side, int gamma);

/// delta_n = p^(Nn) * indicator(||x||_p <= p^(-n)), n <= m.
LatticeField delta_n(const LatticePtr& lattice, int n);

/// Sum in a fixed pairwise-tree order.
std::complex<double> pairwise_sum(std::span<const std::complex<double>> values);
double pairwise_sum(std::span<const double> values);

/// Cell volume times the sum of values.
std::complex<double> integrate(const LatticeField& f);

} // namespace ultraheat
