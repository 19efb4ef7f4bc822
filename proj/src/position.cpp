#include <algorithm>
#include <cmath>
#include <random>
#include <map>
#include <set>
#include <tuple>

#include "portflow/model.hpp"

namespace portflow {

namespace {

constexpr double kOverlapTol = 1e-9;

/// Majorant term w (|p_u - p_v| - target)^2 linearised at the current positions.
struct Spring {
    std::size_t u, v;
    double w, target;
    Point unit;  // (p_u - p_v) / |p_u - p_v| at the linearisation point
};

struct Sibling {
    std::vector<Box> boxes;
    std::set<std::pair<std::size_t, std::size_t>> constrained;
};

class StageOne {
public:
    StageOne(const AuxGraph& aux, const StressConfig& cfg)
        : model_(aux, cfg), aux_(aux), g_(aux.graph), cfg_(cfg), work_(model_.work()), n_(model_.size()),
          vars_(model_.vars())
    {
        for (PortIndex p = 0; p < g_.ports.size(); ++p) dummy_var_.push_back(model_.dummy_var(p));
        for (std::size_t k = 0; k < work_.inter_count; ++k) {
            incident_[work_.edges[k].u].push_back(work_.edges[k].v);
            incident_[work_.edges[k].v].push_back(work_.edges[k].u);
        }
        for (const auto& boxes : model_.sibling_boxes()) siblings_.push_back({boxes, {}});
    }

    StageOneResult run()
    {
        StageOneResult res;
        initial_placement();
        res.flow = build_flow_constraints(work_, cfg_);
        for (int r = 1; r <= 3; ++r) {
            if (r > 1) update_free_sides();
            AxisConstraints cons = model_.port_constraints(free_side_);
            if (r >= 2) cons.x.insert(cons.x.end(), res.flow.constraints.begin(), res.flow.constraints.end());
            if (r == 3) cons.append(model_.cluster_constraints());
            for (Axis a : {Axis::X, Axis::Y}) {
                auto cycle = find_infeasible_cycle(vars_, cons.on(a));
                if (!cycle.empty())
                    throw InfeasibleError("contradictory port or flow constraints on the " +
                                              std::string(a == Axis::X ? "x" : "y") + " axis",
                                          std::move(cycle));
            }
            for (auto& s : siblings_) s.constrained.clear();
            tighten_clusters();
            project_all(cons);
            if (r == 3) remove_overlaps(cons);
            res.runs.push_back(iterate(cons, r == 3));
        }
        res.free_sides = free_side_;
        res.layout = model_.export_layout(xs_, ys_);
        return res;
    }

private:
    double stress(const std::vector<double>& xs, const std::vector<double>& ys) const { return model_.stress(xs, ys); }
    void tighten_clusters() { model_.tighten_clusters(xs_, ys_); }

    void initial_placement()
    {
        xs_.assign(vars_, 0.0);
        ys_.assign(vars_, 0.0);
        std::mt19937_64 rng(cfg_.seed);
        const double side = cfg_.ideal_length * std::sqrt(static_cast<double>(std::max<std::size_t>(n_, 1)));
        std::uniform_real_distribution<double> coord(0.0, side);
        for (std::size_t w = 0; w < n_; ++w) {
            std::size_t a = work_.aux_of[w];
            if (aux_.is_dummy(a)) continue;
            double x = coord(rng), y = coord(rng);
            if (g_.nodes[a].position) x = g_.nodes[a].position->x, y = g_.nodes[a].position->y;
            xs_[w] = x;
            ys_[w] = y;
        }
        free_side_.assign(g_.ports.size(), Side::Right);
        std::vector<bool> is_source(g_.ports.size(), false), is_target(g_.ports.size(), false);
        for (EdgeIndex e = 0; e < g_.edges.size(); ++e) {
            is_source[g_.edge_source(e)] = true;
            is_target[g_.edge_target(e)] = true;
        }
        for (PortIndex p = 0; p < g_.ports.size(); ++p)
            if (is_target[p] && !is_source[p]) free_side_[p] = Side::Left;

        const double ds = aux_.dummy_size;
        for (std::size_t w = 0; w < n_; ++w) {
            std::size_t a = work_.aux_of[w];
            if (aux_.is_dummy(a)) continue;
            const Node& node = g_.nodes[a];
            std::map<Side, std::vector<PortIndex>> sides;
            for (PortIndex p : g_.ports_of(a)) {
                const Port& port = g_.ports[p];
                if (port.constraint == PortConstraint::FixedPosition) continue;
                Side s = port.constraint == PortConstraint::Free ? free_side_[p] : port.side.value_or(Side::Right);
                sides[s].push_back(p);
            }
            for (auto& [s, list] : sides) {
                std::stable_sort(list.begin(), list.end(), [&](PortIndex l, PortIndex r) {
                    return g_.ports[l].declared_order.value_or(0) < g_.ports[r].declared_order.value_or(0);
                });
                bool horizontal = s == Side::Left || s == Side::Right;
                double span = horizontal ? node.height : node.width;
                for (std::size_t i = 0; i < list.size(); ++i) {
                    double lateral = span * (static_cast<double>(i + 1) / static_cast<double>(list.size() + 1) - 0.5);
                    Point n = side_normal(s);
                    Point off{n.x * (node.width / 2 + ds / 2), n.y * (node.height / 2 + ds / 2)};
                    if (horizontal) off.y = lateral; else off.x = lateral;
                    std::size_t dv = dummy_var_[list[i]];
                    xs_[dv] = xs_[w] + off.x;
                    ys_[dv] = ys_[w] + off.y;
                }
            }
            for (PortIndex p : g_.ports_of(a)) {
                const Port& port = g_.ports[p];
                std::size_t dv = dummy_var_[p];
                if (port.constraint == PortConstraint::FixedPosition && port.fixed_offset) {
                    Point o = *port.fixed_offset;
                    auto s = side_of_point(Rect{{0, 0}, node.width, node.height}, o).value_or(Side::Right);
                    Point c = o + side_normal(s) * (ds / 2);
                    xs_[dv] = xs_[w] + c.x;
                    ys_[dv] = ys_[w] + c.y;
                }
                if (port.dummy_position) {
                    xs_[dv] = port.dummy_position->x;
                    ys_[dv] = port.dummy_position->y;
                }
            }
        }
        // keep input Free dummies on the side they were given on
        for (PortIndex p = 0; p < g_.ports.size(); ++p) {
            if (dummy_var_[p] == WorkGraph::npos || !g_.ports[p].dummy_position) continue;
            std::size_t nv = work_.work_of[g_.port_parent(p)];
            const Node& node = g_.nodes[g_.port_parent(p)];
            auto s = side_of_point(Rect{{xs_[nv], ys_[nv]}, node.width, node.height},
                                   {xs_[dummy_var_[p]], ys_[dummy_var_[p]]});
            if (s) free_side_[p] = *s;
        }
    }

    void update_free_sides()
    {
        for (PortIndex p = 0; p < g_.ports.size(); ++p) {
            std::size_t dv = dummy_var_[p];
            if (dv == WorkGraph::npos || g_.ports[p].constraint != PortConstraint::Free) continue;
            std::size_t nv = work_.work_of[g_.port_parent(p)];
            std::vector<Point> nb;
            auto it = incident_.find(dv);
            if (it != incident_.end())
                for (std::size_t o : it->second) nb.push_back({xs_[o], ys_[o]});
            free_side_[p] = choose_free_side({xs_[nv], ys_[nv]}, nb, free_side_[p]);
        }
    }

    void project_all(const AxisConstraints& cons)
    {
        xs_ = project(xs_, cons.x);
        ys_ = project(ys_, cons.y);
    }

    bool overlapping(const Box& a, const Box& b, const std::vector<double>& xs, const std::vector<double>& ys) const
    {
        return separation_need(a, b, Axis::X, xs, ys, cfg_.spacing) > kOverlapTol &&
               separation_need(a, b, Axis::Y, xs, ys, cfg_.spacing) > kOverlapTol;
    }

    /// All ways to separate a pair, cheapest displacement first.
    std::vector<std::pair<Axis, SeparationConstraint>> options(const Box& a, const Box& b) const
    {
        std::vector<std::tuple<double, int, Axis, SeparationConstraint>> opts;
        int k = 0;
        for (Axis ax : {Axis::X, Axis::Y}) {
            const auto& vals = ax == Axis::X ? xs_ : ys_;
            double ab = a.high(ax, vals) + cfg_.spacing - b.low(ax, vals);
            double ba = b.high(ax, vals) + cfg_.spacing - a.low(ax, vals);
            opts.push_back({ab, k++, ax, separate(a, b, ax, cfg_.spacing)});
            opts.push_back({ba, k++, ax, separate(b, a, ax, cfg_.spacing)});
        }
        std::sort(opts.begin(), opts.end(), [](const auto& l, const auto& r) {
            if (std::get<0>(l) != std::get<0>(r)) return std::get<0>(l) < std::get<0>(r);
            return std::get<1>(l) < std::get<1>(r);
        });
        std::vector<std::pair<Axis, SeparationConstraint>> out;
        for (auto& o : opts) out.push_back({std::get<2>(o), std::get<3>(o)});
        return out;
    }

    /// Adds non-overlap constraints for overlapping sibling pairs until a projection
    /// leaves none, skipping separations that contradict constraints already present.
    void remove_overlaps(AxisConstraints& cons)
    {
        for (std::size_t pass = 0; pass < 1000; ++pass) {
            bool added = false;
            for (auto& s : siblings_) {
                for (std::size_t i = 0; i < s.boxes.size(); ++i) {
                    for (std::size_t j = i + 1; j < s.boxes.size(); ++j) {
                        if (s.constrained.count({i, j}) || !overlapping(s.boxes[i], s.boxes[j], xs_, ys_)) continue;
                        bool placed = false;
                        for (auto& [ax, c] : options(s.boxes[i], s.boxes[j])) {
                            auto& list = cons.on(ax);
                            list.push_back(c);
                            if (is_satisfiable(vars_, list)) {
                                placed = true;
                                break;
                            }
                            list.pop_back();
                        }
                        if (!placed) throw LayoutError("nodes cannot be separated without violating constraints");
                        s.constrained.insert({i, j});
                        added = true;
                    }
                }
            }
            if (!added) return;
            tighten_clusters();
            project_all(cons);
        }
        throw LayoutError("overlap removal did not settle");
    }

    /// Constrains pairs that overlap at the candidate along an axis where they are
    /// apart at the current (feasible) positions. Returns whether any were added.
    bool guard_new_overlaps(AxisConstraints& cons, const std::vector<double>& cx, const std::vector<double>& cy)
    {
        bool added = false;
        for (auto& s : siblings_) {
            for (std::size_t i = 0; i < s.boxes.size(); ++i) {
                for (std::size_t j = i + 1; j < s.boxes.size(); ++j) {
                    if (s.constrained.count({i, j}) || !overlapping(s.boxes[i], s.boxes[j], cx, cy)) continue;
                    for (auto& [ax, c] : options(s.boxes[i], s.boxes[j])) {
                        const auto& vals = ax == Axis::X ? xs_ : ys_;
                        if (vals[c.left] + c.gap <= vals[c.right] + kOverlapTol) {
                            cons.on(ax).push_back(c);
                            break;
                        }
                    }
                    s.constrained.insert({i, j});
                    added = true;
                }
            }
        }
        return added;
    }

    std::vector<Spring> springs() const
    {
        std::vector<Spring> out;
        auto rs = model_.rects(xs_, ys_);
        auto add = [&](std::size_t u, std::size_t v, double w, double push) {
            Point d = rs[u].centre - rs[v].centre;
            double len = norm(d);
            Point unit = len > 0 ? d * (1.0 / len) : Point{-1.0, 0.0};
            out.push_back({u, v, w, std::max(0.0, len + push), unit});
        };
        for (std::size_t u = 0; u < n_; ++u) {
            for (std::size_t v = u + 1; v < n_; ++v) {
                double w = model_.terms().weight(u, v);
                if (w == 0.0) continue;
                double short_by = model_.terms().distance(u, v) - boundary_distance(rs[u], rs[v]);
                if (short_by > 0) add(u, v, w, short_by);
            }
        }
        for (const auto& e : model_.terms().edges) {
            double long_by = boundary_distance(rs[e.u], rs[e.v]) - e.ideal;
            if (long_by > 0) add(e.u, e.v, 1.0 / (e.ideal * e.ideal), -long_by);
        }
        return out;
    }

    /// One gradient-projection step direction for the majorant along an axis.
    std::vector<double> direction(const std::vector<Spring>& sp, Axis a,
                                  const std::vector<SeparationConstraint>& cons) const
    {
        const auto& x = a == Axis::X ? xs_ : ys_;
        std::vector<double> grad(vars_, 0.0);
        for (const auto& s : sp) {
            double diff = x[s.u] - x[s.v];
            double pull = s.w * (diff - s.target * coord(s.unit, a));
            grad[s.u] += 2 * pull;
            grad[s.v] -= 2 * pull;
        }
        auto quad = [&](const std::vector<double>& d) {
            double q = 0;
            for (const auto& s : sp) q += s.w * (d[s.u] - d[s.v]) * (d[s.u] - d[s.v]);
            return q;
        };
        double gg = 0;
        for (double v : grad) gg += v * v;
        std::vector<double> dir(vars_, 0.0);
        double gag = quad(grad);
        if (gg == 0 || gag <= 0) return dir;
        double alpha = gg / (2 * gag);
        std::vector<double> target(vars_);
        for (std::size_t i = 0; i < vars_; ++i) target[i] = x[i] - alpha * grad[i];
        auto proj = project(target, cons);
        double gd = 0;
        for (std::size_t i = 0; i < vars_; ++i) {
            dir[i] = proj[i] - x[i];
            gd += grad[i] * dir[i];
        }
        double dad = quad(dir);
        double beta = dad > 0 ? std::clamp(-gd / (2 * dad), 0.0, 1.0) : (gd < 0 ? 1.0 : 0.0);
        for (double& v : dir) v *= beta;
        return dir;
    }

    RunStats iterate(AxisConstraints& cons, bool guard_overlaps)
    {
        RunStats st;
        double cur = stress(xs_, ys_);
        st.stress.push_back(cur);
        for (int it = 0; it < cfg_.max_iterations; ++it) {
            tighten_clusters();
            auto sp = springs();
            std::vector<double> cx, cy;
            double next = cur;
            bool moved = false;
            for (int guard = 0; guard < 64; ++guard) {
                auto dx = direction(sp, Axis::X, cons.x);
                auto dy = direction(sp, Axis::Y, cons.y);
                moved = false;
                for (double step = 1.0; step > 1e-6; step /= 2) {
                    cx = xs_;
                    cy = ys_;
                    for (std::size_t i = 0; i < vars_; ++i) cx[i] += step * dx[i], cy[i] += step * dy[i];
                    next = stress(cx, cy);
                    if (next <= cur) {
                        moved = true;
                        break;
                    }
                }
                if (!moved || !guard_overlaps || !guard_new_overlaps(cons, cx, cy)) break;
                moved = false;
            }
            if (!moved) break;
            xs_ = std::move(cx);
            ys_ = std::move(cy);
            double rel = cur > 0 ? (cur - next) / cur : 0.0;
            cur = next;
            st.stress.push_back(cur);
            ++st.iterations;
            if (rel < cfg_.convergence_tol) break;
        }
        tighten_clusters();
        return st;
    }

    LayoutModel model_;
    const AuxGraph& aux_;
    const DiagramGraph& g_;
    StressConfig cfg_;
    const WorkGraph& work_;
    std::size_t n_ = 0, vars_ = 0;
    std::vector<std::size_t> dummy_var_;
    std::map<std::size_t, std::vector<std::size_t>> incident_;
    std::vector<Sibling> siblings_;
    std::vector<Side> free_side_;
    std::vector<double> xs_, ys_;
};

}  // namespace

StageOneResult position_nodes(const AuxGraph& aux, const StressConfig& cfg)
{
    cfg.validate();
    StageOne s(aux, cfg);
    return s.run();
}

}  // namespace portflow
