#pragma once

// Bottom-up transmission-line channel model: per-segment ABCD chain matrices,
// cascade composition and node-to-node transfer functions on a uniform
// frequency grid. Everything here is a pure function of its inputs.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "plcbandit/errors.hpp"

namespace plcbandit {

using Complex = std::complex<double>;

/// Per-unit-length cable constants (R, L, G, C).
struct CablePrimaryParams
{
    double resistance_per_m = 0.0;  ///< Ohm/m
    double inductance_per_m = 0.0;  ///< H/m
    double conductance_per_m = 0.0; ///< S/m
    double capacitance_per_m = 0.0; ///< F/m

    friend bool operator==(const CablePrimaryParams&, const CablePrimaryParams&) = default;
};

/// Throws ConfigError unless all four constants are strictly positive and finite.
inline void validate_strict(const CablePrimaryParams& p)
{
    for (double v : {p.resistance_per_m, p.inductance_per_m, p.conductance_per_m, p.capacitance_per_m})
    {
        if (!(std::isfinite(v) && v > 0.0))
        {
            throw ConfigError("cable primary parameters must be strictly positive and finite");
        }
    }
}

struct LineSegment
{
    CablePrimaryParams params;
    double length_m = 0.0;

    friend bool operator==(const LineSegment&, const LineSegment&) = default;
};

/// Uniformly spaced grid including both endpoints.
class FrequencyGrid
{
public:
    FrequencyGrid(double f_start_hz, double f_end_hz, std::size_t num_points)
        : f_start_hz_(f_start_hz)
        , f_end_hz_(f_end_hz)
        , num_points_(num_points)
    {
        if (!(std::isfinite(f_start_hz) && std::isfinite(f_end_hz) && f_start_hz > 0.0 && f_start_hz < f_end_hz))
        {
            throw PreconditionError("frequency grid requires 0 < f_start < f_end");
        }
        if (num_points < 2)
        {
            throw PreconditionError("frequency grid requires at least 2 points");
        }
    }

    /// Grid of `count` points starting at `f_start_hz` with the given spacing.
    static FrequencyGrid from_spacing(double f_start_hz, double spacing_hz, std::size_t count)
    {
        return FrequencyGrid(f_start_hz, f_start_hz + spacing_hz * static_cast<double>(count - 1), count);
    }

    double f_start_hz() const noexcept { return f_start_hz_; }
    double f_end_hz() const noexcept { return f_end_hz_; }
    std::size_t size() const noexcept { return num_points_; }
    double bandwidth_hz() const noexcept { return f_end_hz_ - f_start_hz_; }
    double spacing_hz() const noexcept { return bandwidth_hz() / static_cast<double>(num_points_ - 1); }

    double point(std::size_t i) const noexcept
    {
        if (i + 1 == num_points_)
        {
            return f_end_hz_;
        }
        return f_start_hz_ + spacing_hz() * static_cast<double>(i);
    }

    std::vector<double> points() const
    {
        std::vector<double> out(num_points_);
        for (std::size_t i = 0; i < num_points_; ++i)
        {
            out[i] = point(i);
        }
        return out;
    }

    friend bool operator==(const FrequencyGrid&, const FrequencyGrid&) = default;

private:
    double f_start_hz_;
    double f_end_hz_;
    std::size_t num_points_;
};

struct SecondaryLineParams
{
    Complex z0;         ///< characteristic impedance, Ohm
    Complex gamma_prop; ///< propagation constant alpha + j*beta, 1/m
};

/// 2x2 chain matrix at a single frequency.
struct AbcdMatrix
{
    Complex a{1.0, 0.0};
    Complex b{0.0, 0.0};
    Complex c{0.0, 0.0};
    Complex d{1.0, 0.0};

    Complex determinant() const { return a * d - b * c; }

    friend AbcdMatrix operator*(const AbcdMatrix& x, const AbcdMatrix& y)
    {
        return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
    }
};

struct TwoPortABCD
{
    FrequencyGrid grid;
    std::vector<AbcdMatrix> entries; ///< one matrix per grid point

    static TwoPortABCD identity(const FrequencyGrid& grid) { return {grid, std::vector<AbcdMatrix>(grid.size())}; }
};

struct TransferFunction
{
    FrequencyGrid grid;
    std::vector<Complex> h;

    static TransferFunction unity(const FrequencyGrid& grid) { return {grid, std::vector<Complex>(grid.size(), Complex{1.0, 0.0})}; }
};

namespace detail {

inline std::string describe_frequency(double f_hz)
{
    std::ostringstream os;
    os.precision(10);
    os << f_hz << " Hz";
    return os.str();
}

inline void require_same_grid(const FrequencyGrid& x, const FrequencyGrid& y, const char* what)
{
    if (!(x == y))
    {
        throw DimensionError(std::string(what) + ": frequency grids differ");
    }
}

} // namespace detail

/// Characteristic impedance and propagation constant at frequency `f_hz`.
///
/// Principal square roots are taken, then the propagation constant is flipped
/// if needed so that its real part (attenuation) is non-negative. Accepts zero
/// R or G so that lossless and purely resistive idealisations can be evaluated.
inline SecondaryLineParams secondary_params(const CablePrimaryParams& p, double f_hz)
{
    if (!(std::isfinite(f_hz) && f_hz > 0.0))
    {
        throw PreconditionError("secondary_params requires f > 0");
    }
    for (double v : {p.resistance_per_m, p.inductance_per_m, p.conductance_per_m, p.capacitance_per_m})
    {
        if (!(std::isfinite(v) && v >= 0.0))
        {
            throw PreconditionError("cable primary parameters must be non-negative and finite");
        }
    }
    const double omega = 2.0 * std::numbers::pi * f_hz;
    const Complex series{p.resistance_per_m, omega * p.inductance_per_m};
    const Complex shunt{p.conductance_per_m, omega * p.capacitance_per_m};
    if (series == Complex{} || shunt == Complex{})
    {
        throw ComputationError("degenerate cable (zero series impedance or shunt admittance) at " + detail::describe_frequency(f_hz));
    }

    SecondaryLineParams out{std::sqrt(series / shunt), std::sqrt(series * shunt)};
    if (out.gamma_prop.real() < 0.0)
    {
        out.gamma_prop = -out.gamma_prop;
    }
    if (!(std::isfinite(out.z0.real()) && std::isfinite(out.z0.imag()) && std::isfinite(out.gamma_prop.real()) &&
          std::isfinite(out.gamma_prop.imag())))
    {
        throw ComputationError("non-finite secondary line parameters at " + detail::describe_frequency(f_hz));
    }
    return out;
}

/// Chain matrix of a uniform line at each grid frequency.
inline TwoPortABCD abcd_of_segment(const LineSegment& seg, const FrequencyGrid& grid)
{
    if (!(std::isfinite(seg.length_m) && seg.length_m >= 0.0))
    {
        throw PreconditionError("segment length must be non-negative and finite");
    }
    TwoPortABCD out = TwoPortABCD::identity(grid);
    if (seg.length_m == 0.0)
    {
        return out;
    }
    for (std::size_t i = 0; i < grid.size(); ++i)
    {
        const double f = grid.point(i);
        const auto [z0, gamma] = secondary_params(seg.params, f);
        const Complex gl = gamma * seg.length_m;
        const Complex ch = std::cosh(gl);
        const Complex sh = std::sinh(gl);
        AbcdMatrix& m = out.entries[i];
        m.a = ch;
        m.b = z0 * sh;
        m.c = sh / z0;
        m.d = ch;
        for (const Complex& v : {m.a, m.b, m.c})
        {
            if (!(std::isfinite(v.real()) && std::isfinite(v.imag())))
            {
                std::ostringstream os;
                os << "ABCD overflow for segment of length " << seg.length_m << " m at " << detail::describe_frequency(f);
                throw ComputationError(os.str());
            }
        }
    }
    return out;
}

/// Chain product first * second, frequency by frequency.
inline TwoPortABCD cascade_abcd(const TwoPortABCD& first, const TwoPortABCD& second)
{
    detail::require_same_grid(first.grid, second.grid, "cascade_abcd");
    if (first.entries.size() != first.grid.size() || second.entries.size() != second.grid.size())
    {
        throw DimensionError("cascade_abcd: entry count does not match grid");
    }
    TwoPortABCD out{first.grid, std::vector<AbcdMatrix>(first.entries.size())};
    for (std::size_t i = 0; i < out.entries.size(); ++i)
    {
        out.entries[i] = first.entries[i] * second.entries[i];
    }
    return out;
}

/// Voltage transfer V_j / V_i of a two-port terminated in `load` (one value per grid point).
inline TransferFunction transfer_function(const TwoPortABCD& abcd, std::span<const Complex> load)
{
    if (load.size() != abcd.grid.size() || abcd.entries.size() != abcd.grid.size())
    {
        throw DimensionError("transfer_function: load impedance count does not match grid");
    }
    TransferFunction out{abcd.grid, std::vector<Complex>(load.size())};
    for (std::size_t i = 0; i < load.size(); ++i)
    {
        const Complex z = load[i];
        if (!(std::isfinite(z.real()) && std::isfinite(z.imag())) || z == Complex{})
        {
            throw PreconditionError("load impedance must be finite and nonzero at " + detail::describe_frequency(abcd.grid.point(i)));
        }
        const Complex denom = abcd.entries[i].a * z + abcd.entries[i].b;
        if (denom == Complex{})
        {
            throw ComputationError("transfer function singular at " + detail::describe_frequency(abcd.grid.point(i)));
        }
        out.h[i] = z / denom;
        if (!(std::isfinite(out.h[i].real()) && std::isfinite(out.h[i].imag())))
        {
            throw ComputationError("non-finite transfer function at " + detail::describe_frequency(abcd.grid.point(i)));
        }
    }
    return out;
}

/// Frequency-flat load overload.
inline TransferFunction transfer_function(const TwoPortABCD& abcd, Complex load)
{
    const std::vector<Complex> loads(abcd.grid.size(), load);
    return transfer_function(abcd, loads);
}

/// Transfer across an intermediate node: point-wise product.
inline TransferFunction cascade_transfer(const TransferFunction& h_ik, const TransferFunction& h_kj)
{
    detail::require_same_grid(h_ik.grid, h_kj.grid, "cascade_transfer");
    if (h_ik.h.size() != h_kj.h.size())
    {
        throw DimensionError("cascade_transfer: sample counts differ");
    }
    TransferFunction out{h_ik.grid, std::vector<Complex>(h_ik.h.size())};
    for (std::size_t i = 0; i < out.h.size(); ++i)
    {
        out.h[i] = h_ik.h[i] * h_kj.h[i];
    }
    return out;
}

} // namespace plcbandit
