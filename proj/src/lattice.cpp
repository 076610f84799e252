#include "ultraheat/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace ultraheat {

const char* to_string(Side side)
{
    return side == Side::position ? "position" : "frequency";
}

Lattice::Lattice(const LatticeParams& params, std::size_t cell_cap) : params_(params)
{
    require_prime(params.p);
    if (params.dimension < 1) throw InvalidArgument("lattice dimension must be >= 1");
    if (digits() < 1) throw InvalidArgument("lattice needs M + m >= 1");
    if (digits() > 62) throw TooLarge("lattice digit count M + m too large");

    // Overflow-safe size computation against the cap.
    long double total = std::pow(static_cast<long double>(params.p),
                                 static_cast<long double>(digits()) * params.dimension);
    if (total > static_cast<long double>(cell_cap))
        throw TooLarge("lattice with " + std::to_string(static_cast<double>(total)) +
                       " cells exceeds the cap of " + std::to_string(cell_cap));

    axis_length_ = 1;
    for (int i = 0; i < digits(); ++i) axis_length_ *= params.p;
    size_ = 1;
    for (int i = 0; i < params.dimension; ++i) size_ *= static_cast<std::size_t>(axis_length_);

    axis_valuation_.assign(static_cast<std::size_t>(axis_length_), 0);
    axis_valuation_[0] = static_cast<std::uint8_t>(digits());
    for (std::int64_t k = 1; k < axis_length_; ++k) {
        std::int64_t q = k;
        std::uint8_t v = 0;
        while (q % params.p == 0) {
            q /= params.p;
            ++v;
        }
        axis_valuation_[static_cast<std::size_t>(k)] = v;
    }

    depth_.resize(size_);
    const auto n = static_cast<std::size_t>(axis_length_);
    for (std::size_t i = 0; i < size_; ++i) {
        std::size_t rest = i;
        std::uint8_t d = static_cast<std::uint8_t>(digits());
        for (int a = 0; a < params.dimension; ++a) {
            d = std::min(d, axis_valuation_[rest % n]);
            rest /= n;
        }
        depth_[i] = d;
    }
}

std::shared_ptr<const Lattice> Lattice::make(const LatticeParams& params, std::size_t cell_cap)
{
    return std::make_shared<const Lattice>(params, cell_cap);
}

void Lattice::coords(std::size_t index, std::span<std::int64_t> out) const
{
    if (out.size() != static_cast<std::size_t>(dimension()))
        throw DimensionMismatch("coords buffer has wrong length");
    const auto n = static_cast<std::size_t>(axis_length_);
    for (int a = dimension() - 1; a >= 0; --a) {
        out[static_cast<std::size_t>(a)] = static_cast<std::int64_t>(index % n);
        index /= n;
    }
}

std::vector<std::int64_t> Lattice::coords(std::size_t index) const
{
    std::vector<std::int64_t> k(static_cast<std::size_t>(dimension()));
    coords(index, k);
    return k;
}

std::size_t Lattice::index_of(std::span<const std::int64_t> coords) const
{
    if (coords.size() != static_cast<std::size_t>(dimension()))
        throw DimensionMismatch("index_of: wrong coordinate count");
    std::size_t index = 0;
    for (const auto k : coords) {
        const std::int64_t r = ((k % axis_length_) + axis_length_) % axis_length_;
        index = index * static_cast<std::size_t>(axis_length_) + static_cast<std::size_t>(r);
    }
    return index;
}

std::optional<int> Lattice::norm_exponent(std::size_t index, Side side) const
{
    const int d = depth_[index];
    if (d == digits()) return std::nullopt;
    return (side == Side::position ? params_.support : params_.resolution) - d;
}

int Lattice::min_shell(Side side) const
{
    return side == Side::position ? -params_.resolution + 1 : -params_.support + 1;
}

int Lattice::max_shell(Side side) const
{
    return side == Side::position ? params_.support : params_.resolution;
}

std::vector<std::size_t> Lattice::shell(int gamma, Side side) const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < size_; ++i)
        if (norm_exponent(i, side) == gamma) out.push_back(i);
    return out;
}

std::size_t Lattice::shell_count(int gamma, Side side) const
{
    if (gamma < min_shell(side) || gamma > max_shell(side)) return 0;
    const int r = side == Side::position ? params_.resolution : params_.support;
    auto pw = [&](int e) {
        std::size_t v = 1;
        for (int i = 0; i < e; ++i) v *= static_cast<std::size_t>(params_.p);
        return v;
    };
    return pw(params_.dimension * (gamma + r)) - pw(params_.dimension * (gamma - 1 + r));
}

long Lattice::cell_volume_exponent(Side side) const
{
    const long r = side == Side::position ? params_.resolution : params_.support;
    return -r * params_.dimension;
}

double Lattice::cell_volume(Side side) const
{
    return std::pow(static_cast<double>(params_.p), static_cast<double>(cell_volume_exponent(side)));
}

std::size_t Lattice::negate_index(std::size_t index) const
{
    const auto n = static_cast<std::size_t>(axis_length_);
    std::size_t out = 0, scale = 1;
    for (int a = 0; a < dimension(); ++a) {
        const std::size_t k = index % n;
        index /= n;
        out += ((n - k) % n) * scale;
        scale *= n;
    }
    return out;
}

PAdicVector Lattice::representative(std::size_t index, Side side) const
{
    const Rational scale = rational_power(params_.p, side == Side::position ? -params_.support
                                                                             : -params_.resolution);
    std::vector<Rational> xs;
    for (const auto k : coords(index)) xs.emplace_back(scale * Rational(k));
    return PAdicVector(params_.p, std::move(xs));
}

std::string Lattice::digit_string(std::size_t index) const
{
    static constexpr char alphabet[] = "0123456789abcdefghijklmnopqrstuvwxyz";
    if (params_.p > 36) throw InvalidArgument("digit strings need p <= 36");
    std::string out;
    const auto ks = coords(index);
    for (std::size_t a = 0; a < ks.size(); ++a) {
        if (a) out.push_back(':');
        std::string digits_rev;
        std::int64_t k = ks[a];
        for (int j = 0; j < digits(); ++j) {
            digits_rev.push_back(alphabet[k % params_.p]);
            k /= params_.p;
        }
        out.append(digits_rev.rbegin(), digits_rev.rend());
    }
    return out;
}

LatticeField::LatticeField(LatticePtr lattice, Side side)
    : lattice_(std::move(lattice)), side_(side), values_(lattice_->size())
{
}

LatticeField::LatticeField(LatticePtr lattice, Side side, std::vector<std::complex<double>> values)
    : lattice_(std::move(lattice)), side_(side), values_(std::move(values))
{
    if (values_.size() != lattice_->size())
        throw DimensionMismatch("field length does not match lattice size");
}

double LatticeField::max_abs() const
{
    double m = 0;
    for (const auto& v : values_) m = std::max(m, std::abs(v));
    return m;
}

double LatticeField::max_abs_imag() const
{
    double m = 0;
    for (const auto& v : values_) m = std::max(m, std::abs(v.imag()));
    return m;
}

double LatticeField::min_real() const
{
    double m = values_.empty() ? 0.0 : values_.front().real();
    for (const auto& v : values_) m = std::min(m, v.real());
    return m;
}

std::vector<double> LatticeField::real_values() const
{
    std::vector<double> out(values_.size());
    std::transform(values_.begin(), values_.end(), out.begin(), [](auto v) { return v.real(); });
    return out;
}

void LatticeField::require_compatible(const LatticeField& other) const
{
    if (lattice_->params() != other.lattice_->params()) throw DimensionMismatch("fields live on different lattices");
    if (side_ != other.side_) throw SideMismatch("fields live on different sides");
}

LatticeField& LatticeField::operator+=(const LatticeField& other)
{
    require_compatible(other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

LatticeField& LatticeField::operator-=(const LatticeField& other)
{
    require_compatible(other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

LatticeField& LatticeField::operator*=(const LatticeField& other)
{
    require_compatible(other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] *= other.values_[i];
    return *this;
}

LatticeField& LatticeField::operator*=(std::complex<double> scale)
{
    for (auto& v : values_) v *= scale;
    return *this;
}

LatticeField operator+(LatticeField a, const LatticeField& b) { return a += b; }
LatticeField operator-(LatticeField a, const LatticeField& b) { return a -= b; }
LatticeField operator*(LatticeField a, const LatticeField& b) { return a *= b; }
LatticeField operator*(std::complex<double> s, LatticeField a) { return a *= s; }

double max_abs_diff(const LatticeField& a, const LatticeField& b)
{
    if (a.size() != b.size()) throw DimensionMismatch("max_abs_diff: size mismatch");
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

void LatticeField::write_csv(std::ostream& out) const
{
    out << "cell_index,digits,norm_exponent,re,im\n";
    char buf[96];
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const auto g = lattice_->norm_exponent(i, side_);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g", values_[i].real(), values_[i].imag());
        out << i << ',' << lattice_->digit_string(i) << ',' << (g ? std::to_string(*g) : "-inf") << ','
            << buf << '\n';
    }
}

LatticeField sample_function(const LatticePtr& lattice, Side side,
                             const std::function<std::complex<double>(const Cell&)>& f)
{
    LatticeField out(lattice, side);
    std::vector<std::int64_t> k(static_cast<std::size_t>(lattice->dimension()));
    for (std::size_t i = 0; i < lattice->size(); ++i) {
        lattice->coords(i, k);
        out[i] = f(Cell{*lattice, side, i, k, lattice->norm_exponent(i, side)});
    }
    return out;
}

LatticeField sample_radial(const LatticePtr& lattice, Side side,
                           const std::function<double(std::optional<int>)>& g)
{
    // One evaluation per shell.
    const int lo = lattice->min_shell(side), hi = lattice->max_shell(side);
    std::vector<double> table(static_cast<std::size_t>(hi - lo + 1));
    for (int s = lo; s <= hi; ++s) table[static_cast<std::size_t>(s - lo)] = g(s);
    const double origin = g(std::nullopt);
    LatticeField out(lattice, side);
    for (std::size_t i = 0; i < lattice->size(); ++i) {
        const auto e = lattice->norm_exponent(i, side);
        out[i] = e ? table[static_cast<std::size_t>(*e - lo)] : origin;
    }
    return out;
}

LatticeField ball_indicator(const LatticePtr& lattice, Side side, int gamma)
{
    return sample_radial(lattice, side, [gamma](std::optional<int> e) { return !e || *e <= gamma ? 1.0 : 0.0; });
}

LatticeField delta_n(const LatticePtr& lattice, int n)
{
    if (n > lattice->resolution_exponent()) throw InvalidArgument("delta_n needs n <= m");
    const double height = std::pow(static_cast<double>(lattice->prime()), lattice->dimension() * n);
    return height * ball_indicator(lattice, Side::position, -n);
}

namespace {

template <typename T>
T pairwise(std::span<const T> v)
{
    if (v.size() <= 8) {
        T s{};
        for (const auto& x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise(v.first(half)) + pairwise(v.subspan(half));
}

} // namespace

std::complex<double> pairwise_sum(std::span<const std::complex<double>> values)
{
    return pairwise(values);
}

double pairwise_sum(std::span<const double> values)
{
    return pairwise(values);
}

std::complex<double> integrate(const LatticeField& f)
{
    return f.lattice().cell_volume(f.side()) * pairwise_sum(std::span<const std::complex<double>>(f.values()));
}

} // namespace ultraheat
