#include "ultraheat/transform.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace ultraheat {

namespace {

using cd = std::complex<double>;

// exp(-2 pi i j / n) from the exact phase j / n, folded into (-1/2, 1/2].
cd exact_root(std::int64_t j, std::int64_t n)
{
    std::int64_t num = j % n;
    if (2 * num > n) num -= n;
    const long double angle = -2.0L * std::numbers::pi_v<long double> * static_cast<long double>(num) /
                              static_cast<long double>(n);
    return {static_cast<double>(std::cos(angle)), static_cast<double>(std::sin(angle))};
}

} // namespace

TransformPlan::TransformPlan(LatticePtr lattice) : lattice_(std::move(lattice))
{
    const std::int64_t n = lattice_->axis_length();
    const std::int64_t p = lattice_->prime();
    roots_.resize(static_cast<std::size_t>(n));
    for (std::int64_t j = 0; j < n; ++j) roots_[static_cast<std::size_t>(j)] = exact_root(j, n);

    digit_reversal_.resize(static_cast<std::size_t>(n));
    for (std::int64_t j = 0; j < n; ++j) {
        std::int64_t q = j, r = 0;
        for (int d = 0; d < lattice_->digits(); ++d) {
            r = r * p + q % p;
            q /= p;
        }
        digit_reversal_[static_cast<std::size_t>(j)] = static_cast<std::size_t>(r);
    }
}

std::shared_ptr<const TransformPlan> TransformPlan::for_lattice(const LatticePtr& lattice)
{
    static std::mutex mutex;
    static std::map<std::tuple<std::int64_t, int, int, int>, std::shared_ptr<const TransformPlan>> cache;
    const auto& q = lattice->params();
    const auto key = std::make_tuple(q.p, q.dimension, q.support, q.resolution);
    std::lock_guard lock(mutex);
    auto it = cache.find(key);
    if (it == cache.end()) {
        if (cache.size() > 32) cache.clear();
        it = cache.emplace(key, std::make_shared<const TransformPlan>(lattice)).first;
    }
    return it->second;
}

cd TransformPlan::root(std::int64_t j) const
{
    const std::int64_t n = lattice_->axis_length();
    return roots_[static_cast<std::size_t>(((j % n) + n) % n)];
}

void TransformPlan::require_match(const LatticeField& f) const
{
    if (f.lattice().params() != lattice_->params()) throw DimensionMismatch("transform plan does not match field lattice");
}

// In-place DFT of one contiguous line of length p^L: decimation in time
// after a base-p digit reversal, one radix-p butterfly pass per digit.
void TransformPlan::fft_line(cd* data, std::vector<cd>& scratch, bool inverse) const
{
    const auto n = static_cast<std::size_t>(lattice_->axis_length());
    const auto p = static_cast<std::size_t>(lattice_->prime());
    scratch.resize(n + p);
    cd* y = scratch.data();
    cd* a = scratch.data() + n;
    for (std::size_t j = 0; j < n; ++j) y[digit_reversal_[j]] = data[j];

    auto w = [&](std::size_t idx) {
        const cd r = roots_[idx];
        return inverse ? std::conj(r) : r;
    };

    if (p == 2) {
        for (std::size_t sub = 1; sub < n; sub *= 2) {
            const std::size_t len = 2 * sub, stride = n / len;
            for (std::size_t q = 0; q < sub; ++q) {
                const cd wq = w(q * stride);
                for (std::size_t s = q; s < n; s += len) {
                    const cd u = y[s];
                    const cd t = y[s + sub] * wq;
                    y[s] = u + t;
                    y[s + sub] = u - t;
                }
            }
        }
    } else if (p == 3) {
        // w(n/3) = -1/2 -+ i sqrt(3)/2.
        const double h = w(n / 3).imag();
        for (std::size_t sub = 1; sub < n; sub *= 3) {
            const std::size_t len = 3 * sub, stride = n / len;
            for (std::size_t q = 0; q < sub; ++q) {
                const cd w1 = w(q * stride), w2 = w(2 * q * stride);
                for (std::size_t s = q; s < n; s += len) {
                    const cd a0 = y[s];
                    const cd a1 = y[s + sub] * w1;
                    const cd a2 = y[s + 2 * sub] * w2;
                    const cd sum = a1 + a2;
                    const cd dif = a1 - a2;
                    const cd d(-h * dif.imag(), h * dif.real());
                    const cd base = a0 - 0.5 * sum;
                    y[s] = a0 + sum;
                    y[s + sub] = base + d;
                    y[s + 2 * sub] = base - d;
                }
            }
        }
    } else {
        for (std::size_t sub = 1; sub < n; sub *= p) {
            const std::size_t len = sub * p;
            const std::size_t stride = n / len;
            for (std::size_t start = 0; start < n; start += len) {
                for (std::size_t q = 0; q < sub; ++q) {
                    a[0] = y[start + q];
                    for (std::size_t r = 1; r < p; ++r) a[r] = y[start + r * sub + q] * w(r * q * stride);
                    for (std::size_t t = 0; t < p; ++t) {
                        cd acc = a[0];
                        for (std::size_t r = 1; r < p; ++r) acc += a[r] * w((n / p) * ((r * t) % p));
                        y[start + t * sub + q] = acc;
                    }
                }
            }
        }
    }
    std::copy(y, y + n, data);
}

LatticeField TransformPlan::fast(const LatticeField& f) const
{
    require_match(f);
    const bool inverse = f.side() == Side::frequency;
    const auto n = static_cast<std::size_t>(lattice_->axis_length());
    const int dim = lattice_->dimension();

    std::vector<cd> values = f.values();
    std::vector<cd> scratch, line(n);
    // Axis a has stride n^(dim-1-a) in the row-major layout.
    std::size_t stride = 1;
    for (int a = dim - 1; a >= 0; --a) {
        const std::size_t block = stride * n;
        for (std::size_t outer = 0; outer < values.size(); outer += block) {
            for (std::size_t inner = 0; inner < stride; ++inner) {
                cd* base = values.data() + outer + inner;
                if (stride == 1) {
                    fft_line(base, scratch, inverse);
                } else {
                    for (std::size_t j = 0; j < n; ++j) line[j] = base[j * stride];
                    fft_line(line.data(), scratch, inverse);
                    for (std::size_t j = 0; j < n; ++j) base[j * stride] = line[j];
                }
            }
        }
        stride *= n;
    }

    const Side to = inverse ? Side::position : Side::frequency;
    const double scale = lattice_->cell_volume(f.side());
    for (auto& v : values) v *= scale;
    return LatticeField(f.lattice_ptr(), to, std::move(values));
}

LatticeField TransformPlan::naive(const LatticeField& f) const
{
    require_match(f);
    const bool inverse = f.side() == Side::frequency;
    const std::int64_t n = lattice_->axis_length();
    const std::size_t size = lattice_->size();
    const auto dim = static_cast<std::size_t>(lattice_->dimension());

    std::vector<std::int64_t> all_coords(size * dim);
    for (std::size_t i = 0; i < size; ++i) lattice_->coords(i, std::span(all_coords).subspan(i * dim, dim));

    std::vector<cd> out(size);
    std::vector<cd> terms(size);
    for (std::size_t l = 0; l < size; ++l) {
        const std::int64_t* kl = all_coords.data() + l * dim;
        for (std::size_t k = 0; k < size; ++k) {
            const std::int64_t* kk = all_coords.data() + k * dim;
            std::int64_t phase = 0;
            for (std::size_t a = 0; a < dim; ++a) phase = (phase + (kk[a] * kl[a]) % n) % n;
            const cd r = roots_[static_cast<std::size_t>(phase)];
            terms[k] = f[k] * (inverse ? std::conj(r) : r);
        }
        out[l] = pairwise_sum(std::span<const cd>(terms));
    }
    const double scale = lattice_->cell_volume(f.side());
    for (auto& v : out) v *= scale;
    return LatticeField(f.lattice_ptr(), inverse ? Side::position : Side::frequency, std::move(out));
}

LatticeField forward(const LatticeField& f)
{
    if (f.side() != Side::position) throw SideMismatch("forward transform needs a position-side field");
    return TransformPlan::for_lattice(f.lattice_ptr())->fast(f);
}

LatticeField inverse(const LatticeField& g)
{
    if (g.side() != Side::frequency) throw SideMismatch("inverse transform needs a frequency-side field");
    return TransformPlan::for_lattice(g.lattice_ptr())->fast(g);
}

LatticeField fast_transform(const TransformPlan& plan, const LatticeField& f)
{
    return plan.fast(f);
}

LatticeField naive_transform(const LatticeField& f)
{
    return TransformPlan(f.lattice_ptr()).naive(f);
}

LatticeField convolve(const LatticeField& f, const LatticeField& g)
{
    if (f.lattice().params() != g.lattice().params()) throw DimensionMismatch("convolve: lattices differ");
    if (f.side() != Side::position || g.side() != Side::position)
        throw SideMismatch("convolve needs position-side fields");
    return inverse(forward(f) * forward(g));
}

LatticeField apply_multiplier(const LatticeField& f, const LatticeField& multiplier)
{
    if (multiplier.side() != Side::frequency) throw SideMismatch("multiplier must be frequency-side");
    return inverse(forward(f) * multiplier);
}

} // namespace ultraheat
