#include "estavg/boolean_model.hpp"

#include "estavg/distributions.hpp"
#include "estavg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace estavg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Uniform bucket grid over the disc centers; cell side = largest radius, so
// every disc within distance R of a point sits within ceil(R / cell) cells.
class DiscGrid {
public:
    explicit DiscGrid(const std::vector<Disc>& discs) : discs_(discs) {
        if (discs.empty()) return;
        min_x_ = max_x_ = discs.front().center.x;
        min_y_ = max_y_ = discs.front().center.y;
        double r_max = 0.0;
        for (const Disc& d : discs) {
            min_x_ = std::min(min_x_, d.center.x);
            max_x_ = std::max(max_x_, d.center.x);
            min_y_ = std::min(min_y_, d.center.y);
            max_y_ = std::max(max_y_, d.center.y);
            r_max = std::max(r_max, d.radius);
        }
        cell_ = std::max({r_max, (max_x_ - min_x_) / 256.0, (max_y_ - min_y_) / 256.0, 1e-9});
        nx_ = static_cast<int>((max_x_ - min_x_) / cell_) + 1;
        ny_ = static_cast<int>((max_y_ - min_y_) / cell_) + 1;
        start_.assign(static_cast<std::size_t>(nx_ * ny_) + 1, 0);
        std::vector<int> cell_of(discs.size());
        for (std::size_t i = 0; i < discs.size(); ++i) {
            cell_of[i] = cell_index(cx(discs[i].center.x), cy(discs[i].center.y));
            ++start_[static_cast<std::size_t>(cell_of[i]) + 1];
        }
        for (std::size_t c = 1; c < start_.size(); ++c) start_[c] += start_[c - 1];
        items_.resize(discs.size());
        std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
        for (std::size_t i = 0; i < discs.size(); ++i) {
            items_[fill[static_cast<std::size_t>(cell_of[i])]++] = i;
        }
    }

    // Calls f(j) for every disc whose center may lie within `reach` of p.
    template <class F>
    void for_each_near(Point p, double reach, F&& f) const {
        if (discs_.empty()) return;
        const int x_lo = std::max(0, cx(p.x - reach));
        const int x_hi = std::min(nx_ - 1, cx(p.x + reach));
        const int y_lo = std::max(0, cy(p.y - reach));
        const int y_hi = std::min(ny_ - 1, cy(p.y + reach));
        for (int gy = y_lo; gy <= y_hi; ++gy) {
            for (int gx = x_lo; gx <= x_hi; ++gx) {
                const auto c = static_cast<std::size_t>(cell_index(gx, gy));
                for (std::size_t s = start_[c]; s < start_[c + 1]; ++s) f(items_[s]);
            }
        }
    }

private:
    int cx(double x) const { return static_cast<int>(std::floor((x - min_x_) / cell_)); }
    int cy(double y) const { return static_cast<int>(std::floor((y - min_y_) / cell_)); }
    int cell_index(int gx, int gy) const {
        return std::clamp(gy, 0, ny_ - 1) * nx_ + std::clamp(gx, 0, nx_ - 1);
    }

    const std::vector<Disc>& discs_;
    double min_x_ = 0.0, max_x_ = 0.0, min_y_ = 0.0, max_y_ = 0.0;
    double cell_ = 1.0;
    int nx_ = 0, ny_ = 0;
    std::vector<std::size_t> start_;
    std::vector<std::size_t> items_;
};

// Angular interval on a circle: center angle and half-width.
struct Arc {
    double center = 0.0;
    double half = 0.0;
};

// Total length (in radians) of a union of arcs on [0, 2 pi).
double covered_angle(const std::vector<Arc>& arcs, std::vector<std::pair<double, double>>& scratch) {
    scratch.clear();
    for (const Arc& a : arcs) {
        if (a.half >= std::numbers::pi) return kTwoPi;
        if (a.half <= 0.0) continue;
        double start = std::fmod(a.center - a.half, kTwoPi);
        if (start < 0.0) start += kTwoPi;
        const double end = start + 2.0 * a.half;
        if (end > kTwoPi) {
            scratch.emplace_back(start, kTwoPi);
            scratch.emplace_back(0.0, end - kTwoPi);
        } else {
            scratch.emplace_back(start, end);
        }
    }
    std::sort(scratch.begin(), scratch.end());
    double total = 0.0;
    double cur_lo = 0.0;
    double cur_hi = -1.0;
    for (const auto& [lo, hi] : scratch) {
        if (lo > cur_hi) {
            if (cur_hi > cur_lo) total += cur_hi - cur_lo;
            cur_lo = lo;
            cur_hi = hi;
        } else {
            cur_hi = std::max(cur_hi, hi);
        }
    }
    if (cur_hi > cur_lo) total += cur_hi - cur_lo;
    return std::min(total, kTwoPi);
}

// Arc of the circle around `center` (radius r) lying beyond a window side
// with outward normal angle psi at signed distance s (positive inside).
void push_side(std::vector<Arc>& arcs, double psi, double s, double r) {
    const double ratio = s / r;
    if (ratio >= 1.0) return;
    arcs.push_back({psi, ratio <= -1.0 ? std::numbers::pi : std::acos(ratio)});
}

bool same_disc(const Disc& a, const Disc& b) {
    return a.center.x == b.center.x && a.center.y == b.center.y && a.radius == b.radius;
}

}  // namespace

std::size_t draw_poisson(double mean, RngStream& rng) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) throw DomainError("Poisson mean must be finite and >= 0");
    if (mean > 512.0) {
        return draw_poisson(0.5 * mean, rng) + draw_poisson(0.5 * mean, rng);
    }
    std::size_t count = 0;
    double t = rng.exponential();
    while (t < mean) {
        ++count;
        t += rng.exponential();
    }
    return count;
}

DiscSet simulate_boolean(double rho, double alpha, const Window& window, RngStream& rng) {
    if (!(rho > 0.0) || !(alpha > 0.0)) throw DomainError("Boolean model needs rho > 0 and alpha > 0");
    const Window outer = window.dilated(kMaxGrainRadius);
    const std::size_t count = draw_poisson(rho * outer.area(), rng);
    const Distribution radius_law = BetaScaled{alpha};
    DiscSet set;
    set.window = window;
    set.discs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Disc d;
        d.center.x = rng.uniform(outer.x0, outer.x1);
        d.center.y = rng.uniform(outer.y0, outer.y1);
        d.radius = draw(radius_law, rng);
        set.discs.push_back(d);
    }
    return set;
}

double area_fraction(const DiscSet& set, std::size_t resolution) {
    if (resolution < 64) throw DomainError("area resolution must be at least 64");
    const Window& w = set.window;
    const auto res = static_cast<long>(resolution);
    const double sx = static_cast<double>(res) / w.width();
    const double sy = static_cast<double>(res) / w.height();

    // Per pixel row, the integer spans of covered pixel centers.
    std::vector<std::vector<std::pair<long, long>>> rows(resolution);
    for (const Disc& d : set.discs) {
        const long row_lo = std::max(0L, static_cast<long>(std::ceil((d.center.y - d.radius - w.y0) * sy - 0.5)));
        const long row_hi =
            std::min(res - 1, static_cast<long>(std::floor((d.center.y + d.radius - w.y0) * sy - 0.5)));
        for (long iy = row_lo; iy <= row_hi; ++iy) {
            const double yc = w.y0 + (static_cast<double>(iy) + 0.5) / sy;
            const double dy = yc - d.center.y;
            const double h2 = d.radius * d.radius - dy * dy;
            if (h2 < 0.0) continue;
            const double hw = std::sqrt(h2);
            const long lo = std::max(0L, static_cast<long>(std::ceil((d.center.x - hw - w.x0) * sx - 0.5)));
            const long hi = std::min(res - 1, static_cast<long>(std::floor((d.center.x + hw - w.x0) * sx - 0.5)));
            if (lo <= hi) rows[static_cast<std::size_t>(iy)].emplace_back(lo, hi);
        }
    }
    std::size_t covered = 0;
    for (auto& spans : rows) {
        if (spans.empty()) continue;
        std::sort(spans.begin(), spans.end());
        long cur_lo = spans.front().first;
        long cur_hi = spans.front().second;
        for (const auto& [lo, hi] : spans) {
            if (lo > cur_hi + 1) {
                covered += static_cast<std::size_t>(cur_hi - cur_lo + 1);
                cur_lo = lo;
                cur_hi = hi;
            } else {
                cur_hi = std::max(cur_hi, hi);
            }
        }
        covered += static_cast<std::size_t>(cur_hi - cur_lo + 1);
    }
    return static_cast<double>(covered) / (static_cast<double>(resolution) * static_cast<double>(resolution));
}

double perimeter_per_area(const DiscSet& set) {
    const Window& w = set.window;
    const DiscGrid grid(set.discs);
    double r_max = 0.0;
    for (const Disc& d : set.discs) r_max = std::max(r_max, d.radius);

    std::vector<Arc> arcs;
    std::vector<std::pair<double, double>> scratch;
    double length = 0.0;
    for (std::size_t i = 0; i < set.discs.size(); ++i) {
        const Disc& di = set.discs[i];
        const double r = di.radius;
        if (!(r > 0.0)) continue;
        if (di.center.x + r < w.x0 || di.center.x - r > w.x1 || di.center.y + r < w.y0 || di.center.y - r > w.y1) {
            continue;
        }
        arcs.clear();
        push_side(arcs, std::numbers::pi, di.center.x - w.x0, r);
        push_side(arcs, 0.0, w.x1 - di.center.x, r);
        push_side(arcs, -0.5 * std::numbers::pi, di.center.y - w.y0, r);
        push_side(arcs, 0.5 * std::numbers::pi, w.y1 - di.center.y, r);

        bool buried = false;
        grid.for_each_near(di.center, r + r_max, [&](std::size_t j) {
            if (j == i || buried) return;
            const Disc& dj = set.discs[j];
            const double dx = dj.center.x - di.center.x;
            const double dy = dj.center.y - di.center.y;
            const double dist = std::hypot(dx, dy);
            if (dist >= r + dj.radius) return;
            if (same_disc(di, dj)) {
                if (j < i) buried = true;
                return;
            }
            if (dist + r <= dj.radius) {
                buried = true;
                return;
            }
            if (dist + dj.radius <= r) return;
            const double c = (r * r + dist * dist - dj.radius * dj.radius) / (2.0 * r * dist);
            arcs.push_back({std::atan2(dy, dx), std::acos(std::clamp(c, -1.0, 1.0))});
        });
        if (buried) continue;
        length += r * (kTwoPi - covered_angle(arcs, scratch));
    }
    return length / w.area();
}

std::size_t tangent_count(const DiscSet& set, Point u) {
    const double norm = std::hypot(u.x, u.y);
    if (!(norm > 0.0)) throw DomainError("tangent direction must be nonzero");
    const double ux = u.x / norm;
    const double uy = u.y / norm;
    const DiscGrid grid(set.discs);
    double r_max = 0.0;
    for (const Disc& d : set.discs) r_max = std::max(r_max, d.radius);

    std::size_t count = 0;
    for (std::size_t i = 0; i < set.discs.size(); ++i) {
        const Disc& di = set.discs[i];
        const Point p{di.center.x - di.radius * ux, di.center.y - di.radius * uy};
        if (!set.window.contains(p)) continue;
        bool covered = false;
        grid.for_each_near(p, r_max, [&](std::size_t j) {
            if (j == i || covered) return;
            const Disc& dj = set.discs[j];
            if (same_disc(di, dj)) {
                covered = j < i;
                return;
            }
            const double dx = p.x - dj.center.x;
            const double dy = p.y - dj.center.y;
            if (dx * dx + dy * dy < dj.radius * dj.radius) covered = true;
        });
        if (!covered) ++count;
    }
    return count;
}

BooleanMeasurements measure_boolean(const DiscSet& set, const BooleanOptions& options, RngStream& direction_rng) {
    BooleanMeasurements m;
    m.a_obs = area_fraction(set, options.resolution);
    m.p_obs = perimeter_per_area(set);
    m.directions.reserve(options.n_directions);
    m.tangent_counts.reserve(options.n_directions);
    for (std::size_t i = 0; i < options.n_directions; ++i) {
        const double angle = direction_rng.uniform(0.0, kTwoPi);
        m.directions.push_back(angle);
        m.tangent_counts.push_back(tangent_count(set, {std::cos(angle), std::sin(angle)}));
    }
    return m;
}

IntensityShape estimators_rho1_alpha1(double a_obs, double p_obs) {
    if (!(a_obs > 0.0 && a_obs < 1.0)) throw FitError("rho1/alpha1 need an area fraction in (0, 1)");
    if (!(p_obs > 0.0)) throw FitError("rho1/alpha1 need a positive perimeter");
    const double alpha = p_obs / (10.0 * (a_obs - 1.0) * std::log1p(-a_obs)) - 2.0;
    const double rho = 5.0 * (alpha + 1.0) * p_obs / (std::numbers::pi * (1.0 - a_obs));
    return {rho, alpha};
}

double estimator_rho2(const BooleanMeasurements& m, double window_area) {
    if (!(m.a_obs < 1.0)) throw FitError("rho2 needs an area fraction below 1");
    if (m.tangent_counts.empty()) throw DomainError("rho2 needs at least one direction");
    double mean = 0.0;
    for (std::size_t c : m.tangent_counts) mean += static_cast<double>(c);
    mean /= static_cast<double>(m.tangent_counts.size());
    return mean / (window_area * (1.0 - m.a_obs));
}

double estimator_rho2(const DiscSet& set, double a_obs, std::size_t n_directions, RngStream& rng) {
    if (n_directions == 0) throw DomainError("rho2 needs at least one direction");
    BooleanMeasurements m;
    m.a_obs = a_obs;
    for (std::size_t i = 0; i < n_directions; ++i) {
        const double angle = rng.uniform(0.0, kTwoPi);
        m.tangent_counts.push_back(tangent_count(set, {std::cos(angle), std::sin(angle)}));
    }
    return estimator_rho2(m, set.window.area());
}

double boolean_area_theory(double rho, double alpha) {
    const double er2 = 0.02 / ((1.0 + alpha) * (2.0 + alpha));
    return -std::expm1(-std::numbers::pi * rho * er2);
}

double boolean_perimeter_theory(double rho, double alpha) {
    const double er = 0.1 / (1.0 + alpha);
    const double er2 = 0.02 / ((1.0 + alpha) * (2.0 + alpha));
    return 2.0 * std::numbers::pi * rho * er * std::exp(-std::numbers::pi * rho * er2);
}

EstimatorVector boolean_bank_estimates(const BooleanObservation& obs, const BooleanOptions& options) {
    RngStream directions = obs.directions;
    const BooleanMeasurements m = measure_boolean(obs.discs, options, directions);
    const IntensityShape first = estimators_rho1_alpha1(m.a_obs, m.p_obs);
    const double rho2 = estimator_rho2(m, obs.discs.window.area());
    return EstimatorVector(Eigen::Vector3d(first.rho, rho2, first.alpha), GroupStructure{2, 1});
}

EstimatorBank<BooleanObservation> boolean_bank(const BooleanOptions& options) {
    return {GroupStructure{2, 1}, [options](const BooleanObservation& obs) -> Eigen::VectorXd {
                return boolean_bank_estimates(obs, options).values();
            }};
}

Eigen::Vector2d boolean_center(const EstimatorVector& t) { return {0.5 * (t[0] + t[1]), t[2]}; }

ModelSimulator<BooleanObservation> boolean_simulator(const Window& window) {
    return [window](const Eigen::VectorXd& parameter, std::size_t, RngStream& rng) {
        if (!(parameter(0) > 0.0) || !(parameter(1) > 0.0)) {
            throw FitError("Boolean simulator needs rho > 0 and alpha > 0");
        }
        RngStream germs = rng.child(0);
        return BooleanObservation{simulate_boolean(parameter(0), parameter(1), window, germs), rng.child(1)};
    };
}

void write_discs(std::ostream& os, const DiscSet& set) {
    for (const Disc& d : set.discs) {
        os << d.center.x << ' ' << d.center.y << ' ' << d.radius << '\n';
    }
}

}  // namespace estavg
