#include "portflow/separation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <sstream>

namespace portflow {

namespace {

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

std::string describe_cycle(const std::vector<SeparationConstraint>& cycle)
{
    std::ostringstream os;
    os << "infeasible separation constraints:";
    for (const auto& c : cycle) {
        os << " [v" << c.left << (c.equality ? " + " : " + ") << c.gap << (c.equality ? " = v" : " <= v")
           << c.right << "]";
    }
    return os.str();
}

[[noreturn]] void throw_infeasible(std::size_t n, std::span<const SeparationConstraint> cons)
{
    auto cycle = find_infeasible_cycle(n, cons);
    if (cycle.empty()) throw LayoutError("separation solver failed to converge on a feasible system");
    throw InfeasibleError(describe_cycle(cycle), std::move(cycle));
}

/// Block-structured active-set projection for inequality-only separation systems.
class BlockSolver {
public:
    struct Con {
        std::size_t left, right;
        double gap;
        bool active = false;
        double lm = 0.0;
    };

    BlockSolver(std::vector<double> desired, std::vector<double> weight, std::vector<Con> cons)
        : cons_(std::move(cons))
    {
        vars_.resize(desired.size());
        double scale = 1.0;
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            vars_[i].desired = desired[i];
            vars_[i].weight = weight[i];
            vars_[i].block = i;
            scale = std::max(scale, std::abs(desired[i]));
            blocks_.push_back({{i}, 0, 0, 0, true});
            update(i);
        }
        for (std::size_t c = 0; c < cons_.size(); ++c) {
            vars_[cons_[c].left].out.push_back(c);
            vars_[cons_[c].right].in.push_back(c);
            scale = std::max(scale, std::abs(cons_[c].gap));
        }
        slack_tol_ = 1e-12 * scale;
        lm_tol_ = 1e-12 * scale;
    }

    /// Returns false when the system turned out to be infeasible.
    bool solve()
    {
        const std::size_t limit = 200 + 50 * (vars_.size() + cons_.size());
        std::size_t steps = 0;
        for (;;) {
            for (;;) {
                if (++steps > limit) return false;
                std::size_t worst = npos;
                double worst_slack = -slack_tol_;
                for (std::size_t c = 0; c < cons_.size(); ++c) {
                    if (cons_[c].active) continue;
                    double s = slack(c);
                    if (s < worst_slack) worst_slack = s, worst = c;
                }
                if (worst == npos) break;
                const Con& c = cons_[worst];
                if (vars_[c.left].block != vars_[c.right].block) {
                    merge(worst);
                    continue;
                }
                std::size_t b = vars_[c.left].block;
                auto path = active_path(c.left, c.right);
                // only constraints traversed left-to-right can open up room for c
                std::vector<std::size_t> forward;
                std::size_t at = c.left;
                for (std::size_t pc : path) {
                    const Con& q = cons_[pc];
                    if (q.right == at) {
                        at = q.left;
                    } else {
                        forward.push_back(pc);
                        at = q.right;
                    }
                }
                if (forward.empty()) return false;
                compute_lm(b);
                std::size_t split_at = forward.front();
                for (std::size_t pc : forward)
                    if (cons_[pc].lm < cons_[split_at].lm) split_at = pc;
                split(b, split_at);
                merge(worst);
            }
            bool any_split = false;
            const std::size_t nblocks = blocks_.size();
            for (std::size_t b = 0; b < nblocks; ++b) {
                if (!blocks_[b].alive || blocks_[b].vars.size() < 2) continue;
                compute_lm(b);
                std::size_t best = npos;
                double best_lm = -lm_tol_;
                for (std::size_t v : blocks_[b].vars) {
                    for (std::size_t c : vars_[v].out) {
                        if (cons_[c].active && cons_[c].lm < best_lm) best_lm = cons_[c].lm, best = c;
                    }
                }
                if (best != npos) {
                    split(b, best);
                    any_split = true;
                }
                if (++steps > limit) return false;
            }
            if (!any_split) break;
        }
        return true;
    }

    double position(std::size_t v) const { return blocks_[vars_[v].block].posn + vars_[v].offset; }

private:
    struct Var {
        double desired = 0, weight = 1, offset = 0;
        std::size_t block = 0;
        std::vector<std::size_t> in, out;
    };
    struct Block {
        std::vector<std::size_t> vars;
        double posn, wposn, weight;
        bool alive;
    };

    double slack(std::size_t c) const
    {
        return position(cons_[c].right) - position(cons_[c].left) - cons_[c].gap;
    }

    void update(std::size_t b)
    {
        Block& blk = blocks_[b];
        blk.wposn = 0;
        blk.weight = 0;
        for (std::size_t v : blk.vars) {
            blk.wposn += vars_[v].weight * (vars_[v].desired - vars_[v].offset);
            blk.weight += vars_[v].weight;
        }
        blk.posn = blk.wposn / blk.weight;
    }

    void merge(std::size_t ci)
    {
        Con& c = cons_[ci];
        std::size_t lb = vars_[c.left].block, rb = vars_[c.right].block;
        double dist = vars_[c.left].offset + c.gap - vars_[c.right].offset;
        std::size_t into = lb, from = rb;
        if (blocks_[rb].vars.size() > blocks_[lb].vars.size()) {
            into = rb;
            from = lb;
            dist = -dist;
        }
        for (std::size_t v : blocks_[from].vars) {
            vars_[v].offset += dist;
            vars_[v].block = into;
            blocks_[into].vars.push_back(v);
        }
        blocks_[from].vars.clear();
        blocks_[from].alive = false;
        c.active = true;
        update(into);
    }

    void split(std::size_t b, std::size_t ci)
    {
        cons_[ci].active = false;
        std::vector<std::size_t> left_part = reach(cons_[ci].left);
        std::set<std::size_t> left_set(left_part.begin(), left_part.end());
        std::vector<std::size_t> right_part;
        for (std::size_t v : blocks_[b].vars)
            if (!left_set.count(v)) right_part.push_back(v);
        blocks_[b].vars = left_part;
        update(b);
        std::size_t nb = blocks_.size();
        blocks_.push_back({right_part, 0, 0, 0, true});
        for (std::size_t v : right_part) vars_[v].block = nb;
        update(nb);
    }

    std::vector<std::size_t> reach(std::size_t start) const
    {
        std::vector<std::size_t> seen{start};
        std::set<std::size_t> mark{start};
        for (std::size_t i = 0; i < seen.size(); ++i) {
            std::size_t v = seen[i];
            auto visit = [&](std::size_t c, std::size_t other) {
                if (cons_[c].active && mark.insert(other).second) seen.push_back(other);
            };
            for (std::size_t c : vars_[v].out) visit(c, cons_[c].right);
            for (std::size_t c : vars_[v].in) visit(c, cons_[c].left);
        }
        return seen;
    }

    /// Active constraints on the tree path from `from` to `to`.
    std::vector<std::size_t> active_path(std::size_t from, std::size_t to) const
    {
        std::vector<std::pair<std::size_t, std::size_t>> parent;  // (prev var, via constraint)
        std::vector<std::size_t> order{from};
        std::vector<std::size_t> pv(vars_.size(), npos), pc(vars_.size(), npos);
        pv[from] = from;
        for (std::size_t i = 0; i < order.size() && pv[to] == npos; ++i) {
            std::size_t v = order[i];
            auto visit = [&](std::size_t c, std::size_t other) {
                if (cons_[c].active && pv[other] == npos) {
                    pv[other] = v;
                    pc[other] = c;
                    order.push_back(other);
                }
            };
            for (std::size_t c : vars_[v].out) visit(c, cons_[c].right);
            for (std::size_t c : vars_[v].in) visit(c, cons_[c].left);
        }
        std::vector<std::size_t> path;
        for (std::size_t v = to; v != from; v = pv[v]) path.push_back(pc[v]);
        std::reverse(path.begin(), path.end());
        return path;
    }

    void compute_lm(std::size_t b)
    {
        const auto& vs = blocks_[b].vars;
        if (vs.empty()) return;
        // iterative post-order over the active spanning tree
        struct Frame {
            std::size_t v, via;
            double dfdv;
            std::size_t next_out = 0, next_in = 0;
        };
        std::vector<Frame> stack;
        auto grad = [&](std::size_t v) { return 2 * vars_[v].weight * (position(v) - vars_[v].desired); };
        stack.push_back({vs.front(), npos, grad(vs.front())});
        while (!stack.empty()) {
            Frame& f = stack.back();
            const Var& var = vars_[f.v];
            if (f.next_out < var.out.size()) {
                std::size_t c = var.out[f.next_out++];
                if (cons_[c].active && c != f.via) {
                    std::size_t child = cons_[c].right;
                    stack.push_back({child, c, grad(child)});
                }
                continue;
            }
            if (f.next_in < var.in.size()) {
                std::size_t c = var.in[f.next_in++];
                if (cons_[c].active && c != f.via) {
                    std::size_t child = cons_[c].left;
                    stack.push_back({child, c, grad(child)});
                }
                continue;
            }
            Frame done = f;
            stack.pop_back();
            if (done.via == npos) break;
            Con& c = cons_[done.via];
            Frame& parent = stack.back();
            if (c.right == done.v) {
                c.lm = done.dfdv;
                parent.dfdv += c.lm;
            } else {
                c.lm = -done.dfdv;
                parent.dfdv -= c.lm;
            }
        }
    }

    std::vector<Var> vars_;
    std::vector<Block> blocks_;
    std::vector<Con> cons_;
    double slack_tol_ = 1e-10;
    double lm_tol_ = 1e-10;
};

/// Union-find over equality constraints: x_i = x_root + offset_i.
struct EqualityClasses {
    std::vector<std::size_t> parent;
    std::vector<double> offset;

    explicit EqualityClasses(std::size_t n) : parent(n), offset(n, 0.0)
    {
        for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    }
    std::pair<std::size_t, double> find(std::size_t i)
    {
        if (parent[i] == i) return {i, 0.0};
        auto [root, off] = find(parent[i]);
        parent[i] = root;
        offset[i] += off;
        return {root, offset[i]};
    }
};

}  // namespace

std::vector<double> project(std::span<const Variable> vars, std::span<const SeparationConstraint> cons)
{
    const std::size_t n = vars.size();
    for (const auto& v : vars) {
        if (!(v.weight > 0) || !std::isfinite(v.weight))
            throw LayoutError("separation variable weight must be positive and finite");
    }
    for (const auto& c : cons) {
        if (c.left >= n || c.right >= n) throw LayoutError("separation constraint references unknown variable");
        if (c.left == c.right) throw LayoutError("separation constraint must relate two distinct variables");
    }

    EqualityClasses eq(n);
    for (const auto& c : cons) {
        if (!c.equality) continue;
        auto [rl, ol] = eq.find(c.left);
        auto [rr, orr] = eq.find(c.right);
        if (rl == rr) {
            if (std::abs(ol + c.gap - orr) > kFeasibilityTol) throw_infeasible(n, cons);
            continue;
        }
        eq.parent[rr] = rl;
        eq.offset[rr] = ol + c.gap - orr;
    }

    std::vector<std::size_t> reduced(n, npos);
    std::vector<std::size_t> roots;
    std::vector<double> root_offset(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto [r, off] = eq.find(i);
        root_offset[i] = off;
        if (reduced[r] == npos) {
            reduced[r] = roots.size();
            roots.push_back(r);
        }
    }
    std::vector<double> wsum(roots.size(), 0.0), dsum(roots.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t k = reduced[eq.find(i).first];
        wsum[k] += vars[i].weight;
        dsum[k] += vars[i].weight * (vars[i].desired - root_offset[i]);
    }
    std::vector<double> desired(roots.size());
    for (std::size_t k = 0; k < roots.size(); ++k) desired[k] = dsum[k] / wsum[k];

    std::vector<BlockSolver::Con> reduced_cons;
    for (const auto& c : cons) {
        if (c.equality) continue;
        std::size_t l = reduced[eq.find(c.left).first], r = reduced[eq.find(c.right).first];
        double gap = c.gap + root_offset[c.left] - root_offset[c.right];
        if (l == r) {
            if (gap > kFeasibilityTol) throw_infeasible(n, cons);
            continue;
        }
        reduced_cons.push_back({l, r, gap});
    }

    BlockSolver solver(desired, wsum, std::move(reduced_cons));
    if (!solver.solve()) throw_infeasible(n, cons);

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = solver.position(reduced[eq.find(i).first]) + root_offset[i];
    if (max_violation(out, cons) > kFeasibilityTol) throw_infeasible(n, cons);
    return out;
}

std::vector<double> project(std::span<const double> desired, std::span<const SeparationConstraint> cons)
{
    std::vector<Variable> vars(desired.size());
    for (std::size_t i = 0; i < desired.size(); ++i) vars[i] = {desired[i], 1.0, desired[i]};
    return project(vars, cons);
}

std::vector<SeparationConstraint> find_infeasible_cycle(std::size_t n,
                                                        std::span<const SeparationConstraint> cons)
{
    // longest paths: x_right >= x_left + gap; positive cycles mean infeasibility
    struct Arc {
        std::size_t from, to;
        double w;
        std::size_t con;
    };
    std::vector<Arc> arcs;
    arcs.reserve(cons.size() * 2);
    for (std::size_t i = 0; i < cons.size(); ++i) {
        const auto& c = cons[i];
        if (c.left >= n || c.right >= n) throw LayoutError("separation constraint references unknown variable");
        arcs.push_back({c.left, c.right, c.gap, i});
        if (c.equality) arcs.push_back({c.right, c.left, -c.gap, i});
    }
    std::vector<double> dist(n, 0.0);
    std::vector<std::size_t> pred(n, npos);
    double scale = 1.0;
    for (const auto& a : arcs) scale = std::max(scale, std::abs(a.w));
    const double eps = 1e-10 * scale;
    std::size_t last = npos;
    for (std::size_t pass = 0; pass <= n; ++pass) {
        last = npos;
        for (std::size_t k = 0; k < arcs.size(); ++k) {
            const Arc& a = arcs[k];
            if (dist[a.from] + a.w > dist[a.to] + eps) {
                dist[a.to] = dist[a.from] + a.w;
                pred[a.to] = k;
                last = a.to;
            }
        }
        if (last == npos) return {};
    }
    // walk back n steps to land on the cycle
    std::size_t v = last;
    for (std::size_t i = 0; i < n; ++i) v = arcs[pred[v]].from;
    std::vector<SeparationConstraint> cycle;
    std::size_t u = v;
    do {
        const Arc& a = arcs[pred[u]];
        cycle.push_back(cons[a.con]);
        u = a.from;
    } while (u != v && cycle.size() <= n);
    std::reverse(cycle.begin(), cycle.end());
    return cycle;
}

bool is_satisfiable(std::size_t n, std::span<const SeparationConstraint> cons)
{
    return find_infeasible_cycle(n, cons).empty();
}

bool is_satisfiable(std::span<const SeparationConstraint> cons)
{
    std::size_t n = 0;
    for (const auto& c : cons) n = std::max({n, c.left + 1, c.right + 1});
    return is_satisfiable(n, cons);
}

double max_violation(std::span<const double> x, std::span<const SeparationConstraint> cons)
{
    double worst = 0.0;
    for (const auto& c : cons) {
        double d = x[c.left] + c.gap - x[c.right];
        worst = std::max(worst, c.equality ? std::abs(d) : d);
    }
    return worst;
}

double separation_need(const Box& a, const Box& b, Axis axis, std::span<const double> xs,
                       std::span<const double> ys, double spacing)
{
    auto vals = axis == Axis::X ? xs : ys;
    double ab = a.high(axis, vals) + spacing - b.low(axis, vals);
    double ba = b.high(axis, vals) + spacing - a.low(axis, vals);
    return std::min(ab, ba);
}

SeparationConstraint separate(const Box& first, const Box& second, Axis axis, double spacing)
{
    const auto& hi = first.hi[static_cast<int>(axis)];
    const auto& lo = second.lo[static_cast<int>(axis)];
    return {hi.var, lo.var, hi.offset + spacing - lo.offset, false};
}

std::pair<Axis, SeparationConstraint> least_displacement_separation(
    const Box& a, const Box& b, std::span<const double> xs, std::span<const double> ys, double spacing)
{
    double nx = separation_need(a, b, Axis::X, xs, ys, spacing);
    double ny = separation_need(a, b, Axis::Y, xs, ys, spacing);
    Axis axis = ny < nx ? Axis::Y : Axis::X;
    auto vals = axis == Axis::X ? xs : ys;
    double ab = a.high(axis, vals) + spacing - b.low(axis, vals);
    double ba = b.high(axis, vals) + spacing - a.low(axis, vals);
    bool a_first;
    if (ab != ba) {
        a_first = ab < ba;
    } else {
        double ca = (a.low(axis, vals) + a.high(axis, vals)) / 2;
        double cb = (b.low(axis, vals) + b.high(axis, vals)) / 2;
        a_first = ca <= cb;
    }
    return {axis, a_first ? separate(a, b, axis, spacing) : separate(b, a, axis, spacing)};
}

AxisConstraints generate_nonoverlap(std::span<const Rect> rects, double spacing, double horizon)
{
    if (spacing < 0) throw LayoutError("non-overlap spacing must be non-negative");
    const std::size_t n = rects.size();
    std::vector<double> xs(n), ys(n);
    std::vector<Box> boxes;
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = rects[i].centre.x;
        ys[i] = rects[i].centre.y;
        boxes.push_back(Box::node(i, i, rects[i].width / 2, rects[i].height / 2));
    }
    AxisConstraints out;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double nx = separation_need(boxes[i], boxes[j], Axis::X, xs, ys, spacing);
            double ny = separation_need(boxes[i], boxes[j], Axis::Y, xs, ys, spacing);
            if (!(nx > -horizon && ny > -horizon)) continue;
            if (horizon == 0.0 && !(nx > 0 && ny > 0)) continue;
            auto [axis, con] = least_displacement_separation(boxes[i], boxes[j], xs, ys, spacing);
            out.on(axis).push_back(con);
        }
    }
    return out;
}

AxisConstraints cluster_constraints(const ClusterSpec& spec)
{
    AxisConstraints out;
    const double pad = spec.padding;
    for (const auto& m : spec.members) {
        out.x.push_back({spec.min_x, m.var_x, pad + m.half_w, false});
        out.x.push_back({m.var_x, spec.max_x, m.half_w + pad, false});
        out.y.push_back({spec.min_y, m.var_y, pad + m.half_h, false});
        out.y.push_back({m.var_y, spec.max_y, m.half_h + pad, false});
    }
    for (const ClusterSpec* child : spec.children) {
        out.x.push_back({spec.min_x, child->min_x, pad, false});
        out.x.push_back({child->max_x, spec.max_x, pad, false});
        out.y.push_back({spec.min_y, child->min_y, pad, false});
        out.y.push_back({child->max_y, spec.max_y, pad, false});
    }
    if (spec.members.empty() && spec.children.empty()) {
        out.x.push_back({spec.min_x, spec.max_x, 2 * pad, false});
        out.y.push_back({spec.min_y, spec.max_y, 2 * pad, false});
    }
    return out;
}

void check_cluster_membership(std::span<const ClusterSpec> siblings)
{
    std::set<std::size_t> seen;
    for (const auto& s : siblings) {
        for (const auto& m : s.members) {
            if (!seen.insert(m.var_x).second)
                throw GraphError("a member of cluster '" + s.id + "' also belongs to a sibling cluster");
        }
    }
}

}  // namespace portflow
