#pragma once

#include "vactrap/params.hpp"

#include <array>
#include <complex>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <new>
#include <span>
#include <vector>

namespace vactrap {

using cplx = std::complex<double>;

// 64-byte aligned storage so FFTW can use its SIMD codelets on every channel.
template <class T>
struct AlignedAllocator {
    using value_type = T;
    static constexpr std::align_val_t alignment{64};

    AlignedAllocator() noexcept = default;
    template <class U>
    AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

    T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), alignment)); }
    void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, alignment); }

    template <class U>
    bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using ComplexBuffer = std::vector<cplx, AlignedAllocator<cplx>>;

// Uniform periodic grid, positions in 1/k, momenta in hbar k (FFT ordering).
struct Grid {
    std::size_t n = 0;
    double half_extent = 0;
    double dx = 0;
    std::vector<double> x;
    std::vector<double> p;

    double p_max() const;
};

// Largest spacing that still resolves a unit recoil phase exp(-i u x).
inline constexpr double max_recoil_dx = 0.5;

// n must be a power of two >= 64 and half_extent > 0.
Grid make_grid(std::size_t n, double half_extent);

// Errors when the spacing cannot resolve recoil phases, warns when the box
// is smaller than two cavity widths.
std::vector<Diagnostic> validate_grid(const Grid& grid, double cavity_width);

// Internal channels, in the same order as the subspace matrix basis.
enum class Channel : int { g0 = 0, e0 = 1, g1 = 2 };
inline constexpr std::array<Channel, 3> all_channels{Channel::g0, Channel::e0, Channel::g1};

struct ChannelSet {
    bool g0 = true, e0 = true, g1 = true;
    bool contains(Channel c) const;
    static ChannelSet all() { return {}; }
    static ChannelSet only(Channel c);
};

// Three complex amplitude arrays <x|phi_g0>, <x|phi_e0>, <x|phi_g1>, stored
// channel-major in one contiguous buffer of 3n values.
class WaveState {
public:
    WaveState() = default;
    explicit WaveState(std::size_t n);

    std::size_t size() const { return n_; }
    std::span<cplx> channel(Channel c);
    std::span<const cplx> channel(Channel c) const;
    std::span<cplx> g0() { return channel(Channel::g0); }
    std::span<cplx> e0() { return channel(Channel::e0); }
    std::span<cplx> g1() { return channel(Channel::g1); }
    std::span<const cplx> g0() const { return channel(Channel::g0); }
    std::span<const cplx> e0() const { return channel(Channel::e0); }
    std::span<const cplx> g1() const { return channel(Channel::g1); }

    std::span<cplx> data() { return data_; }
    std::span<const cplx> data() const { return data_; }

    void scale(double f);

    bool operator==(const WaveState&) const = default;

private:
    std::size_t n_ = 0;
    ComplexBuffer data_;
};

// Normalised Gaussian packet exp(-(x-x0)^2/(4 w^2) + i p0 x) in one channel;
// w is the standard deviation of the density.
WaveState gaussian_state(const Grid& grid, double center, double width,
                         Channel channel = Channel::g0, double momentum = 0.0);

// In-place unnormalised forward and normalised inverse DFT of all three
// channels (FFTW). Construction is serialised internally; execution is
// thread safe.
class SpectralTransform {
public:
    explicit SpectralTransform(std::size_t n);
    ~SpectralTransform();
    SpectralTransform(const SpectralTransform&) = delete;
    SpectralTransform& operator=(const SpectralTransform&) = delete;
    SpectralTransform(SpectralTransform&&) noexcept;
    SpectralTransform& operator=(SpectralTransform&&) noexcept;

    std::size_t size() const;
    void forward(WaveState& s) const;
    // normalize = false leaves the factor n in place for callers that fold it
    // into their own spectral multiplier.
    void inverse(WaveState& s, bool normalize = true) const;

private:
    struct Plans;
    std::unique_ptr<Plans> plans_;
};

double norm_sq(const WaveState& s, const Grid& grid);
double channel_norm_sq(const WaveState& s, const Grid& grid, Channel c);
std::array<double, 3> channel_norms_sq(const WaveState& s, const Grid& grid);

// Normalises to unit total norm; returns the norm^2 before.
double normalize(WaveState& s, const Grid& grid);

// Fraction of the total density with |x| < sigma.
double inside_probability(const WaveState& s, const Grid& grid, double sigma);

// Multiplies the selected channels by exp(-i u x); shifts momentum by -u hbar k.
WaveState apply_momentum_kick(WaveState s, const Grid& grid, double u,
                              ChannelSet channels = ChannelSet::all());

double mean_position(const WaveState& s, const Grid& grid);
double mean_momentum(const WaveState& s, const SpectralTransform& fft, const Grid& grid);
double mean_momentum_sq(const WaveState& s, const SpectralTransform& fft, const Grid& grid);
// E_R <p^2>, rad/s.
double kinetic_energy(const WaveState& s, const SpectralTransform& fft, const Grid& grid,
                      double recoil_energy);

// Smooth cos^2 ramp from 1 to 0 over the outer `fraction` of the box on
// each side.
std::vector<double> absorbing_mask(const Grid& grid, double fraction = 0.05);

// Snapshot in columns x, |phi_g0|^2, |phi_g1|^2, |phi_e0|^2.
void write_density_csv(std::ostream& os, const WaveState& s, const Grid& grid);

} // namespace vactrap
