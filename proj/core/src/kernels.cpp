#include "mvsim/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "mvsim/errors.hpp"

namespace mvsim {

Kernel Kernel::beta22() { return Kernel(Kind::beta22); }

Kernel Kernel::triangular() { return Kernel(Kind::triangular); }

Kernel Kernel::table(std::vector<double> breakpoints, std::vector<double> densities,
                     std::vector<std::string>* warnings) {
    if (breakpoints.size() != densities.size())
        throw DomainError("table kernel: breakpoints and densities differ in length");
    if (breakpoints.size() < 2) throw DomainError("table kernel: need at least two breakpoints");
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
        if (!(breakpoints[i] >= 0.0 && breakpoints[i] <= 1.0))
            throw DomainError("table kernel: breakpoint outside [0,1]");
        if (i > 0 && !(breakpoints[i] > breakpoints[i - 1]))
            throw DomainError("table kernel: breakpoints must be strictly increasing");
        if (!(densities[i] >= 0.0) || !std::isfinite(densities[i]))
            throw DomainError("table kernel: density must be finite and nonnegative");
    }

    Kernel k(Kind::table);
    k.cum_.assign(breakpoints.size(), 0.0);
    double mass = 0.0;
    for (std::size_t i = 1; i < breakpoints.size(); ++i) {
        mass += 0.5 * (densities[i] + densities[i - 1]) * (breakpoints[i] - breakpoints[i - 1]);
        k.cum_[i] = mass;
    }
    if (!(mass > 0.0)) throw DomainError("table kernel: zero total mass");
    if (warnings != nullptr) {
        if (std::abs(mass - 1.0) > 1e-6) {
            std::ostringstream os;
            os << "table kernel mass " << mass << " renormalized to 1";
            warnings->push_back(os.str());
        }
        if (breakpoints.front() == 0.0 && densities.front() != 0.0)
            warnings->push_back("table kernel density at 0 is nonzero (zero-trace condition not met)");
    }
    for (auto& c : k.cum_) c /= mass;
    k.cum_.back() = 1.0;
    k.raw_mass_ = mass;
    k.breaks_ = std::move(breakpoints);
    k.dens_ = std::move(densities);
    return k;
}

std::string Kernel::name() const {
    switch (kind_) {
        case Kind::beta22: return "beta22";
        case Kind::triangular: return "triangular";
        case Kind::table: return "table";
    }
    return "unknown";
}

double Kernel::pdf(double t) const noexcept {
    switch (kind_) {
        case Kind::beta22:
            return (t > 0.0 && t < 1.0) ? 6.0 * t * (1.0 - t) : 0.0;
        case Kind::triangular:
            return (t >= 0.0 && t < 1.0) ? 2.0 * (1.0 - t) : 0.0;
        case Kind::table: {
            if (t < breaks_.front() || t > breaks_.back()) return 0.0;
            auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
            std::size_t i = it == breaks_.end() ? breaks_.size() - 1
                                                : static_cast<std::size_t>(it - breaks_.begin());
            if (i == 0) return dens_.front() / raw_mass_;
            const double w = (t - breaks_[i - 1]) / (breaks_[i] - breaks_[i - 1]);
            return ((1.0 - w) * dens_[i - 1] + w * dens_[i]) / raw_mass_;
        }
    }
    return 0.0;
}

double Kernel::cdf(double t) const noexcept {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    switch (kind_) {
        case Kind::beta22: return t * t * (3.0 - 2.0 * t);
        case Kind::triangular: return t * (2.0 - t);
        case Kind::table: {
            if (t <= breaks_.front()) return 0.0;
            if (t >= breaks_.back()) return 1.0;
            auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
            const auto i = static_cast<std::size_t>(it - breaks_.begin());
            const double h = breaks_[i] - breaks_[i - 1];
            const double slope = (dens_[i] - dens_[i - 1]) / h;
            const double s = t - breaks_[i - 1];
            const double c = cum_[i - 1] + (dens_[i - 1] * s + 0.5 * slope * s * s) / raw_mass_;
            return std::clamp(c, cum_[i - 1], cum_[i]);
        }
    }
    return 0.0;
}

double Kernel::quantile(double u) const noexcept {
    if (u <= 0.0) return kind_ == Kind::table ? breaks_.front() : 0.0;
    if (u >= 1.0) return kind_ == Kind::table ? breaks_.back() : 1.0;
    switch (kind_) {
        case Kind::beta22:
            return 0.5 + std::cos((std::acos(1.0 - 2.0 * u) - 2.0 * std::numbers::pi) / 3.0);
        case Kind::triangular:
            return 1.0 - std::sqrt(1.0 - u);
        case Kind::table: {
            double lo = breaks_.front();
            double hi = breaks_.back();
            while (hi - lo > 1e-12) {
                const double mid = 0.5 * (lo + hi);
                if (cdf(mid) < u)
                    lo = mid;
                else
                    hi = mid;
            }
            return 0.5 * (lo + hi);
        }
    }
    return 0.0;
}

Kernel load_table_kernel(const std::filesystem::path& path, std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open kernel table " + path.string());
    std::vector<double> t;
    std::vector<double> d;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double a = 0.0;
        double b = 0.0;
        if (!(ls >> a >> b)) {
            if (lineno == 1) continue;  // header
            throw IoError("kernel table " + path.string() + ": bad line " + std::to_string(lineno));
        }
        t.push_back(a);
        d.push_back(b);
    }
    return Kernel::table(std::move(t), std::move(d), warnings);
}

double kernel_pdf(const Kernel& k, double t) noexcept { return k.pdf(t); }

double rescaled_pdf(const Kernel& k, double eps, double t) {
    if (!(eps > 0.0)) throw DomainError("rescaled_pdf: eps must be positive");
    return k.pdf(t / eps) / eps;
}

double rescaled_cdf(const Kernel& k, double eps, double t) {
    if (!(eps > 0.0)) throw DomainError("rescaled_cdf: eps must be positive");
    return k.cdf(t / eps);
}

double DiscretizedKernel::max_weight() const noexcept {
    return weights.empty() ? 0.0 : *std::max_element(weights.begin(), weights.end());
}

double DiscretizedKernel::smoothed_at(std::span<const double> values, std::size_t k) const noexcept {
    const std::size_t lags = std::min(max_lag(), k);
    double s = 0.0;
    for (std::size_t j = 0; j <= lags; ++j) s += weights[j] * values[k - j];
    return std::min(s, values[k]);
}

DiscretizedKernel discretize(const Kernel& k, double eps, const TimeGrid& grid) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("discretize: eps must be positive");
    const double dt = grid.dt();
    // eps = 10 * dt must pass even when eps / 10 rounds below dt.
    if (dt > eps / 10.0 * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "time step " << dt << " exceeds eps/10 = " << eps / 10.0;
        throw DiscretisationError(os.str());
    }
    const auto lags = static_cast<std::size_t>(std::ceil(eps / dt * (1.0 - 1e-12)));
    DiscretizedKernel dk{eps, dt, std::vector<double>(lags + 1, 0.0)};
    double total = 0.0;
    double prev = 0.0;
    for (std::size_t j = 0; j <= lags; ++j) {
        const double next = k.cdf(static_cast<double>(j + 1) * dt / eps);
        dk.weights[j] = std::max(next - prev, 0.0);
        total += dk.weights[j];
        prev = next;
    }
    for (auto& w : dk.weights) w /= total;
    return dk;
}

LossPath convolve_loss(const DiscretizedKernel& dk, const LossPath& loss) {
    if (std::abs(dk.dt - loss.grid().dt()) > 0.0) throw GridMismatch("convolve_loss: grid mismatch");
    std::vector<double> out(loss.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = dk.smoothed_at(loss.values(), k);
    return LossPath::make(loss.grid(), std::move(out));
}

}  // namespace mvsim
