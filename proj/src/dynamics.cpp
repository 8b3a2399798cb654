#include "cpbnr/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <thread>

namespace cpbnr {

BlockCoefficients assemble_block(int n, const CoefficientSet& c) {
    const double nn = static_cast<double>(n);
    const std::complex<double> mi(0.0, -1.0);
    BlockCoefficients k;
    k.a_n = mi * (nn * c.omega + 0.5 * c.omega_c + c.chi * (nn * nn - nn))
            - 0.5 * (c.kappa + nn * c.delta);
    k.b_n = mi * ((nn + 1.0) * c.omega - 0.5 * c.omega_c + c.chi * (nn * nn + nn))
            - 0.5 * (nn + 1.0) * c.delta;
    k.g_n = mi * c.lambda * std::sqrt(nn + 1.0);
    return k;
}

void block_rhs(const BlockCoefficients& k,
               const std::complex<double>& c1n, const std::complex<double>& c0n1,
               std::complex<double>& dc1n, std::complex<double>& dc0n1) {
    dc1n = k.a_n * c1n + k.g_n * c0n1;
    dc0n1 = k.b_n * c0n1 + k.g_n * c1n;
}

void IntegratorConfig::validate() const {
    if (!(rtol > 0.0) || !(atol > 0.0))
        throw std::invalid_argument("IntegratorConfig: tolerances must be positive");
    if (!(t_end >= 0.0) || !std::isfinite(t_end))
        throw std::invalid_argument("IntegratorConfig: t_end must be finite and non-negative");
    if (!(output_stride > 0.0))
        throw std::invalid_argument("IntegratorConfig: output_stride must be positive");
    if (threads < 1)
        throw std::invalid_argument("IntegratorConfig: threads must be >= 1");
}

namespace {

using cplx = std::complex<double>;

struct Blk2 {
    cplx u, v;  // (C_{1,n}, C_{0,n+1}) or their gauge-transformed images
};

inline Blk2 operator+(const Blk2& a, const Blk2& b) { return {a.u + b.u, a.v + b.v}; }
inline Blk2 operator-(const Blk2& a, const Blk2& b) { return {a.u - b.u, a.v - b.v}; }
inline Blk2 operator*(double s, const Blk2& a) { return {s * a.u, s * a.v}; }

// Trace-phase gauge.  With mu_n = (a_n + b_n)/2 the substitution
// C = exp(q_n(t)) d, q_n(t) = int_0^t mu_n, leaves the traceless residual
//   d1' =  dres d1 + g d0,   d0' = -dres d0 + g d1,
//   dres = a_n - mu_n = i(omega - omega_c + 2 chi n)/2 + (delta - kappa)/4.
// q_n has a closed form because int_0^t f(s) ds does (integral_f), so the
// fast common phase never enters the numerical problem.  dres is built from
// the detuning directly instead of as a difference of O(n*omega) diagonals,
// which would lose half the mantissa at omega0/lambda0 ~ 2e4.
class TraceGauge {
public:
    TraceGauge(int n, const SystemParams& p, const ModulationLaw& law)
        : n_(n), p_(&p), law_(&law), root_(std::sqrt(n + 1.0)),
          dk4_(0.25 * (p.delta - p.kappa)),
          decay4_(0.25 * (p.kappa + (2.0 * n + 1.0) * p.delta)) {}

    void begin_step(double, const Blk2&) {}
    void end_step_accept(double, double, Blk2&) {}
    static constexpr bool kFsal = true;

    Blk2 rhs(double t, double, const Blk2& y) const {
        const CoefficientSet c = eval_coefficients(*p_, *law_, t);
        const cplx dres(dk4_, 0.5 * (c.omega - c.omega_c + 2.0 * c.chi * n_));
        const cplx g(0.0, -c.lambda * root_);
        return {dres * y.u + g * y.v, -dres * y.v + g * y.u};
    }

    Blk2 physical(double t, double, const Blk2& y) const {
        const cplx G = std::exp(trace_integral(t));
        return {G * y.u, G * y.v};
    }

private:
    cplx trace_integral(double t) const {
        const double F = integral_f(*law_, t);
        const double phase = (n_ + 0.5) * (p_->omega0 * t + F)
                             + (p_->chi0 * t + p_->epsilon * F) * static_cast<double>(n_) * n_;
        return cplx(-decay4_ * t, -phase);
    }

    int n_;
    const SystemParams* p_;
    const ModulationLaw* law_;
    double root_, dk4_, decay4_;
};

// Direct gauge.  The stored state is the physical amplitude pair itself.
// Each step applies an exact integrating factor for the diagonal frozen at
// the step start (w = exp(-diag (t-t0)) C), so the embedded pair only has to
// resolve the diagonal drift within the step and the slow coupling rotation
// exp((b0-a0) s), never the O(n*omega) common phase.  Refreezing at every
// step start keeps the transform local; nothing carries across steps, and
// observables read the state as-is.
class DirectGauge {
public:
    DirectGauge(int n, const SystemParams& p, const ModulationLaw& law)
        : n_(n), p_(&p), law_(&law) {}

    void begin_step(double t, const Blk2&) {
        const BlockCoefficients k = assemble_block(n_, eval_coefficients(*p_, *law_, t));
        a0_ = k.a_n;
        b0_ = k.b_n;
    }

    void end_step_accept(double, double h, Blk2& y) const {
        y.u *= std::exp(a0_ * h);
        y.v *= std::exp(b0_ * h);
    }
    static constexpr bool kFsal = false;  // the frame changes every step

    Blk2 rhs(double t, double s, const Blk2& y) const {
        const BlockCoefficients k = assemble_block(n_, eval_coefficients(*p_, *law_, t));
        const cplx rot = std::exp((b0_ - a0_) * s);
        const cplx roti = std::exp((a0_ - b0_) * s);
        return {(k.a_n - a0_) * y.u + k.g_n * rot * y.v,
                (k.b_n - b0_) * y.v + k.g_n * roti * y.u};
    }

    Blk2 physical(double, double s, const Blk2& y) const {
        return {std::exp(a0_ * s) * y.u, std::exp(b0_ * s) * y.v};
    }

private:
    int n_;
    const SystemParams* p_;
    const ModulationLaw* law_;
    cplx a0_ = 0.0, b0_ = 0.0;
};

// Dormand-Prince 5(4) tableau.
constexpr double kC2 = 1.0 / 5.0, kC3 = 3.0 / 10.0, kC4 = 4.0 / 5.0, kC5 = 8.0 / 9.0;
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                 kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0,
                 kA64 = 49.0 / 176.0, kA65 = -5103.0 / 18656.0;
constexpr double kA71 = 35.0 / 384.0, kA73 = 500.0 / 1113.0, kA74 = 125.0 / 192.0,
                 kA75 = -2187.0 / 6784.0, kA76 = 11.0 / 84.0;
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0, kE4 = 71.0 / 1920.0,
                 kE5 = -17253.0 / 339200.0, kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;
// quartic dense-output weights
constexpr double kD1 = -12715105075.0 / 11282082432.0, kD3 = 87487479700.0 / 32700410799.0,
                 kD4 = -10690763975.0 / 1880347072.0, kD5 = 701980252875.0 / 199316789632.0,
                 kD6 = -1453857185.0 / 822651844.0, kD7 = 69997945.0 / 29380423.0;

// step-size controller constants (PI, beta = 0.04)
constexpr double kSafety = 0.9, kBeta = 0.04, kExpo1 = 0.2 - kBeta * 0.75;
constexpr double kFacc1 = 5.0;   // 1/facmin
constexpr double kFacc2 = 0.1;   // 1/facmax
constexpr std::int64_t kMaxStepsPerBlock = 200'000'000;

// Writes physical amplitudes for grid samples as integration passes them.
struct SampleSink {
    double stride = 0.0;
    std::int64_t next_k = 0;   // global index of the next pending sample
    std::int64_t last_k = -1;  // last global index of the current window
    cplx* row1 = nullptr;      // current window storage, index k - offset
    cplx* row0 = nullptr;
    std::int64_t offset = 0;

    double time_of(std::int64_t k) const { return static_cast<double>(k) * stride; }
    void put(std::int64_t k, const Blk2& phys) {
        row1[k - offset] = phys.u;
        row0[k - offset] = phys.v;
    }
};

// One excitation block integrated over the full run, pausing at window
// boundaries.  Owns its step-size history, so the trajectory is identical
// no matter how blocks are scheduled across workers.
template <class Policy>
class BlockRun {
public:
    BlockRun(Policy pol, const Blk2& y0, double rtol, double atol)
        : pol_(std::move(pol)), y_(y0), rtol_(rtol), atol_(atol) {}

    // Advances to time target; when sink is non-null, emits every grid sample
    // with time <= target encountered on the way (dense output within steps).
    void advance_to(double target, SampleSink* sink) {
        const double snap = 1e-9;
        if (sink) emit_current(*sink);
        if (target <= t_ + snap * std::max(1.0, std::abs(t_))) {
            t_ = std::max(t_, target);
            return;
        }
        if (!started_) start();

        while (t_ < target) {
            if (!k1_valid_) {
                pol_.begin_step(t_, y_);
                k1_ = pol_.rhs(t_, 0.0, y_);
                k1_valid_ = true;
            }
            bool clamped = false;
            double h = h_;
            if (t_ + h >= target) {
                h = target - t_;
                clamped = true;
            }
            if (!(h > 0.0) || h < 1e-14 * std::max(1.0, std::abs(t_)))
                throw IntegrationError("step size underflow", t_);
            if (++steps_ > kMaxStepsPerBlock)
                throw IntegrationError("step budget exhausted", t_);

            const Blk2 y2 = y_ + h * (kA21 * k1_);
            const Blk2 k2 = pol_.rhs(t_ + kC2 * h, kC2 * h, y2);
            const Blk2 y3 = y_ + h * (kA31 * k1_ + kA32 * k2);
            const Blk2 k3 = pol_.rhs(t_ + kC3 * h, kC3 * h, y3);
            const Blk2 y4 = y_ + h * (kA41 * k1_ + kA42 * k2 + kA43 * k3);
            const Blk2 k4 = pol_.rhs(t_ + kC4 * h, kC4 * h, y4);
            const Blk2 y5 = y_ + h * (kA51 * k1_ + kA52 * k2 + kA53 * k3 + kA54 * k4);
            const Blk2 k5 = pol_.rhs(t_ + kC5 * h, kC5 * h, y5);
            const Blk2 y6 = y_ + h * (kA61 * k1_ + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5);
            const Blk2 k6 = pol_.rhs(t_ + h, h, y6);
            Blk2 y1 = y_ + h * (kA71 * k1_ + kA73 * k3 + kA74 * k4 + kA75 * k5 + kA76 * k6);
            const Blk2 k7 = pol_.rhs(t_ + h, h, y1);
            const Blk2 ev = h * (kE1 * k1_ + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);

            const double err = error_norm(y_, y1, ev);
            if (!std::isfinite(err))
                throw IntegrationError("non-finite state", t_);

            const double fac11 = std::pow(err, kExpo1);
            if (err <= 1.0) {
                // dense coefficients for this step, then hand out samples
                if (sink && sink->next_k <= sink->last_k &&
                    sink->time_of(sink->next_k) <= t_ + h + snap) {
                    const Blk2 dy = y1 - y_;
                    const Blk2 r3 = h * k1_ - dy;
                    const Blk2 r4 = dy - h * k7 - r3;
                    const Blk2 r5 = h * (kD1 * k1_ + kD3 * k3 + kD4 * k4 + kD5 * k5 +
                                         kD6 * k6 + kD7 * k7);
                    while (sink->next_k <= sink->last_k) {
                        const double tk = sink->time_of(sink->next_k);
                        if (tk > t_ + h + snap) break;
                        double th = (tk - t_) / h;
                        th = std::clamp(th, 0.0, 1.0);
                        const Blk2 yi = y_ + th * (dy + (1.0 - th) * (r3 + th * (r4 + (1.0 - th) * r5)));
                        sink->put(sink->next_k, pol_.physical(tk, tk - t_, yi));
                        ++sink->next_k;
                    }
                }
                pol_.end_step_accept(t_, h, y1);
                t_ = clamped ? target : t_ + h;
                y_ = y1;
                const double fac = std::clamp(fac11 / std::pow(facold_, kBeta) / kSafety,
                                              kFacc2, kFacc1);
                double hnew = h / fac;
                if (rejected_) hnew = std::min(hnew, h);
                rejected_ = false;
                facold_ = std::max(err, 1e-4);
                h_ = hnew;
                if (Policy::kFsal) {
                    k1_ = k7;
                } else {
                    k1_valid_ = false;
                }
            } else {
                h_ = h / std::min(kFacc1, fac11 / kSafety);
                rejected_ = true;
            }
        }
        t_ = target;
    }

    Blk2 physical_state() const { return pol_.physical(t_, 0.0, y_); }

private:
    void emit_current(SampleSink& sink) {
        const double snap = 1e-9;
        while (sink.next_k <= sink.last_k && sink.time_of(sink.next_k) <= t_ + snap) {
            sink.put(sink.next_k, pol_.physical(t_, 0.0, y_));
            ++sink.next_k;
        }
    }

    double error_norm(const Blk2& y0, const Blk2& y1, const Blk2& ev) const {
        auto comp = [&](double e, double a0, double a1) {
            const double sc = atol_ + rtol_ * std::max(std::abs(a0), std::abs(a1));
            const double q = e / sc;
            return q * q;
        };
        const double s = comp(ev.u.real(), y0.u.real(), y1.u.real()) +
                         comp(ev.u.imag(), y0.u.imag(), y1.u.imag()) +
                         comp(ev.v.real(), y0.v.real(), y1.v.real()) +
                         comp(ev.v.imag(), y0.v.imag(), y1.v.imag());
        return std::sqrt(0.25 * s);
    }

    // standard two-probe guess for the first step size
    void start() {
        pol_.begin_step(t_, y_);
        k1_ = pol_.rhs(t_, 0.0, y_);
        k1_valid_ = true;
        started_ = true;

        auto wrms = [&](const Blk2& a, const Blk2& ref) {
            auto c = [&](double x, double r) {
                const double sc = atol_ + rtol_ * std::abs(r);
                return (x / sc) * (x / sc);
            };
            return std::sqrt(0.25 * (c(a.u.real(), ref.u.real()) + c(a.u.imag(), ref.u.imag()) +
                                     c(a.v.real(), ref.v.real()) + c(a.v.imag(), ref.v.imag())));
        };
        const double d0 = wrms(y_, y_);
        const double d1 = wrms(k1_, y_);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        const Blk2 yp = y_ + h0 * k1_;
        const Blk2 f1 = pol_.rhs(t_ + h0, h0, yp);
        const double d2 = wrms(f1 - k1_, y_) / h0;
        double h1;
        if (std::max(d1, d2) <= 1e-15)
            h1 = std::max(1e-6, h0 * 1e-3);
        else
            h1 = std::pow(0.01 / std::max(d1, d2), 0.2);
        h_ = std::min(100.0 * h0, h1);
    }

    Policy pol_;
    Blk2 y_;
    double rtol_, atol_;
    double t_ = 0.0;
    double h_ = 1e-6;
    double facold_ = 1e-4;
    Blk2 k1_{};
    bool k1_valid_ = false;
    bool started_ = false;
    bool rejected_ = false;
    std::int64_t steps_ = 0;
};

std::int64_t sample_count(double t_end, double stride) {
    return static_cast<std::int64_t>(std::floor(t_end / stride + 1e-9)) + 1;
}

// Runs a closure over block indices on cfg.threads workers.  The work per
// block is self-contained, so scheduling affects timing only.
template <class Fn>
void for_each_block(int nb, int threads, Fn&& fn) {
    threads = std::max(1, std::min(threads, nb));
    if (threads == 1) {
        for (int b = 0; b < nb; ++b) fn(b);
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex err_mutex;
    auto worker = [&] {
        int b;
        while ((b = next.fetch_add(1)) < nb) {
            if (failed.load(std::memory_order_relaxed)) return;
            try {
                fn(b);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

template <class Policy>
std::vector<BlockRun<Policy>> make_runs(const AmplitudeState& s0, const SystemParams& p,
                                        const ModulationLaw& law, const IntegratorConfig& cfg) {
    std::vector<BlockRun<Policy>> runs;
    runs.reserve(s0.n_max + 1);
    for (int n = 0; n <= s0.n_max; ++n)
        runs.emplace_back(Policy(n, p, law), Blk2{s0.c1[n], s0.c0[n + 1]}, cfg.rtol, cfg.atol);
    return runs;
}

// C_{0,0} only sees its own diagonal -i(-omega_c/2); solved in closed form.
cplx groundstate_amp(const cplx& c00_0, double omega_c, double t) {
    return c00_0 * std::polar(1.0, 0.5 * omega_c * t);
}

template <class Policy>
TrajectoryRecord propagate_impl(const AmplitudeState& s0, const SystemParams& p,
                                const ModulationLaw& law, const IntegratorConfig& cfg) {
    const int nb = s0.n_max + 1;
    const std::int64_t total = sample_count(cfg.t_end, cfg.output_stride);

    TrajectoryRecord rec;
    rec.times.resize(total);
    rec.inversion.resize(total);
    rec.entropy.resize(total);
    rec.norm2.resize(total);
    rec.mean_n.resize(total);
    for (std::int64_t k = 0; k < total; ++k)
        rec.times[k] = static_cast<double>(k) * cfg.output_stride;

    auto runs = make_runs<Policy>(s0, p, law, cfg);

    // windowed sweep: bounded sample storage, reduction in fixed block order
    const std::int64_t window = std::max<std::int64_t>(1, 2'000'000 / nb);
    std::vector<cplx> row1(static_cast<size_t>(nb) * std::min(window, total));
    std::vector<cplx> row0(row1.size());
    const double c00n2 = std::norm(s0.c0[0]);

    std::int64_t k_begin = 0;
    while (k_begin < total) {
        const std::int64_t k_end = std::min(k_begin + window, total);
        const std::int64_t w = k_end - k_begin;
        const double t_target = rec.times[k_end - 1];

        for_each_block(nb, cfg.threads, [&](int b) {
            SampleSink sink;
            sink.stride = cfg.output_stride;
            sink.next_k = k_begin;
            sink.last_k = k_end - 1;
            sink.offset = k_begin;
            sink.row1 = row1.data() + static_cast<size_t>(b) * w;
            sink.row0 = row0.data() + static_cast<size_t>(b) * w;
            runs[b].advance_to(t_target, &sink);
        });

        for (std::int64_t k = k_begin; k < k_end; ++k) {
            const std::int64_t j = k - k_begin;
            double cc = 0.0, ss = 0.0, nnum = 0.0;
            cplx cs = 0.0;
            for (int b = 0; b < nb; ++b) {
                const double p1 = std::norm(row1[static_cast<size_t>(b) * w + j]);
                const double p0 = std::norm(row0[static_cast<size_t>(b) * w + j]);
                cc += p1;
                ss += p0;
                nnum += b * p1 + (b + 1.0) * p0;
            }
            for (int b = 0; b + 1 < nb; ++b)
                cs += std::conj(row1[static_cast<size_t>(b + 1) * w + j]) *
                      row0[static_cast<size_t>(b) * w + j];
            const double norm2 = cc + ss + c00n2;
            rec.inversion[k] = cc - ss;
            rec.norm2[k] = norm2;
            rec.mean_n[k] = norm2 > 1e-300 ? nnum / norm2 : 0.0;
            rec.entropy[k] = entropy_from_inputs({cc, ss, cs}, norm2, cfg.entropy_renormalize);
        }
        k_begin = k_end;
    }
    return rec;
}

template <class Policy>
AmplitudeState final_state_impl(const AmplitudeState& s0, const SystemParams& p,
                                const ModulationLaw& law, const IntegratorConfig& cfg,
                                double t_end) {
    const int nb = s0.n_max + 1;
    auto runs = make_runs<Policy>(s0, p, law, cfg);
    for_each_block(nb, cfg.threads, [&](int b) { runs[b].advance_to(t_end, nullptr); });

    AmplitudeState out;
    out.n_max = s0.n_max;
    out.t = t_end;
    out.c1.resize(nb);
    out.c0.resize(nb + 1);
    out.c0[0] = groundstate_amp(s0.c0[0], p.omega_c, t_end);
    for (int b = 0; b < nb; ++b) {
        const Blk2 phys = runs[b].physical_state();
        out.c1[b] = phys.u;
        out.c0[b + 1] = phys.v;
    }
    return out;
}

void check_inputs(const AmplitudeState& s0, const SystemParams& p, const IntegratorConfig& cfg) {
    p.validate();
    cfg.validate();
    if (!s0.dims_consistent())
        throw std::invalid_argument("propagate: amplitude arrays inconsistent with n_max");
}

} // namespace

TrajectoryRecord propagate(const AmplitudeState& s0, const SystemParams& p,
                           const ModulationLaw& law, const IntegratorConfig& cfg) {
    check_inputs(s0, p, cfg);
    if (cfg.gauge == Gauge::TraceRemoved)
        return propagate_impl<TraceGauge>(s0, p, law, cfg);
    return propagate_impl<DirectGauge>(s0, p, law, cfg);
}

AmplitudeState propagate_state(const AmplitudeState& s0, const SystemParams& p,
                               const ModulationLaw& law, const IntegratorConfig& cfg,
                               double t_end) {
    check_inputs(s0, p, cfg);
    if (!(t_end >= 0.0) || !std::isfinite(t_end))
        throw std::invalid_argument("propagate_state: t_end must be finite and non-negative");
    if (cfg.gauge == Gauge::TraceRemoved)
        return final_state_impl<TraceGauge>(s0, p, law, cfg, t_end);
    return final_state_impl<DirectGauge>(s0, p, law, cfg, t_end);
}

} // namespace cpbnr
