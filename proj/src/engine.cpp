#include "sizeaware/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sizeaware {

std::string to_string(Discipline d) {
    switch (d) {
    case Discipline::fifo: return "fifo";
    case Discipline::lifo: return "lifo";
    case Discipline::ps: return "ps";
    case Discipline::spt: return "spt";
    case Discipline::srpt: return "srpt";
    case Discipline::sptp: return "sptp";
    }
    return "unknown";
}

Discipline parse_discipline(const std::string& name) {
    if (name == "fifo") return Discipline::fifo;
    if (name == "lifo" || name == "lifo_preemptive") return Discipline::lifo;
    if (name == "ps") return Discipline::ps;
    if (name == "spt") return Discipline::spt;
    if (name == "srpt") return Discipline::srpt;
    if (name == "sptp") return Discipline::sptp;
    throw std::invalid_argument("unknown discipline '" + name + "'");
}

QueueState::QueueState(Discipline discipline, double rate) : discipline_(discipline), rate_(rate) {
    if (!(rate > 0) || !std::isfinite(rate)) throw std::invalid_argument("server rate must be positive");
}

double QueueState::backlog() const {
    double u = 0.0;
    for (const auto& j : jobs_) u += j.remaining;
    return u;
}

namespace {

// Strict-weak "a is served before b" for the priority disciplines.
bool before(Discipline d, const QueuedJob& a, const QueuedJob& b) {
    switch (d) {
    case Discipline::fifo: return a.arrival_seq < b.arrival_seq;
    case Discipline::lifo: return a.arrival_seq > b.arrival_seq;
    case Discipline::spt:
        if (a.original != b.original) return a.original < b.original;
        return a.arrival_seq < b.arrival_seq;
    case Discipline::ps:
    case Discipline::srpt:
        if (a.remaining != b.remaining) return a.remaining < b.remaining;
        return a.arrival_seq < b.arrival_seq;
    case Discipline::sptp: {
        const double pa = a.remaining * a.original, pb = b.remaining * b.original;
        if (pa != pb) return pa < pb;
        return a.arrival_seq < b.arrival_seq;
    }
    }
    return false;
}

}  // namespace

std::size_t QueueState::select_index() const {
    if (discipline_ == Discipline::spt && locked_) {
        for (std::size_t i = 0; i < jobs_.size(); ++i)
            if (jobs_[i].id == *locked_) return i;
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < jobs_.size(); ++i)
        if (before(discipline_, jobs_[i], jobs_[best])) best = i;
    return best;
}

void QueueState::refresh_lock() {
    if (discipline_ != Discipline::spt) return;
    if (jobs_.empty()) {
        locked_.reset();
        return;
    }
    if (locked_ && std::any_of(jobs_.begin(), jobs_.end(), [&](const QueuedJob& j) { return j.id == *locked_; }))
        return;
    locked_.reset();
    locked_ = jobs_[select_index()].id;
}

std::vector<Service> QueueState::select_in_service() const {
    std::vector<Service> out;
    if (jobs_.empty()) return out;
    if (discipline_ == Discipline::ps) {
        const double share = 1.0 / static_cast<double>(jobs_.size());
        for (const auto& j : jobs_) out.push_back({j.id, share});
        return out;
    }
    out.push_back({jobs_[select_index()].id, 1.0});
    return out;
}

AdvanceResult QueueState::advance(double dt) {
    if (!(dt >= 0)) throw std::invalid_argument("advance requires dt >= 0");
    AdvanceResult res;
    double elapsed = 0.0;
    while (!jobs_.empty() && elapsed < dt) {
        const double n = static_cast<double>(jobs_.size());
        double b_sum = 0.0;
        for (const auto& j : jobs_) b_sum += j.holding_rate;
        const double left = dt - elapsed;

        if (discipline_ == Discipline::ps) {
            double r_min = std::numeric_limits<double>::infinity();
            for (const auto& j : jobs_) r_min = std::min(r_min, j.remaining);
            const double t_done = r_min * n / rate_;
            if (t_done <= left) {
                elapsed += t_done;
                res.holding_cost += b_sum * t_done;
                res.job_time += n * t_done;
                std::vector<QueuedJob> kept;
                kept.reserve(jobs_.size());
                for (auto& j : jobs_) {
                    if (j.remaining <= r_min) {
                        res.departures.push_back({j.id, elapsed});
                    } else {
                        j.remaining -= r_min;
                        kept.push_back(j);
                    }
                }
                jobs_.swap(kept);
            } else {
                const double served = left * rate_ / n;
                for (auto& j : jobs_) j.remaining -= served;
                res.holding_cost += b_sum * left;
                res.job_time += n * left;
                elapsed = dt;
            }
            continue;
        }

        const std::size_t k = select_index();
        const double t_done = jobs_[k].remaining / rate_;
        if (t_done <= left) {
            elapsed += t_done;
            res.holding_cost += b_sum * t_done;
            res.job_time += n * t_done;
            res.departures.push_back({jobs_[k].id, elapsed});
            jobs_.erase(jobs_.begin() + static_cast<std::ptrdiff_t>(k));
            refresh_lock();
        } else {
            jobs_[k].remaining -= left * rate_;
            res.holding_cost += b_sum * left;
            res.job_time += n * left;
            elapsed = dt;
        }
    }
    return res;
}

void QueueState::admit(const QueuedJob& job) {
    if (!(job.remaining > 0) || !std::isfinite(job.remaining))
        throw std::invalid_argument("admitted job needs positive finite size");
    if (!(job.original >= job.remaining)) throw std::invalid_argument("remaining work exceeds original size");
    if (!(job.holding_rate > 0)) throw std::invalid_argument("holding rate must be positive");
    jobs_.push_back(job);
    next_seq_ = std::max(next_seq_, job.arrival_seq + 1);
    refresh_lock();
}

std::uint64_t QueueState::admit(double size, double holding_rate) {
    QueuedJob j;
    j.id = next_seq_;
    j.arrival_seq = next_seq_;
    j.remaining = j.original = size;
    j.holding_rate = holding_rate;
    admit(j);
    return j.id;
}

std::vector<std::size_t> QueueState::priority_order() const {
    std::vector<std::size_t> idx(jobs_.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const Discipline order = discipline_ == Discipline::ps ? Discipline::srpt : discipline_;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return before(order, jobs_[a], jobs_[b]); });
    if (discipline_ == Discipline::spt && locked_) {
        auto it = std::find_if(idx.begin(), idx.end(), [&](std::size_t i) { return jobs_[i].id == *locked_; });
        std::rotate(idx.begin(), it, it + 1);
    }
    return idx;
}

double QueueState::drain_cost() const {
    const auto order = priority_order();
    double cost = 0.0;
    if (discipline_ == Discipline::ps) {
        // Completion order is by remaining work; the k-th finisher shares the
        // server with n-k others until then.
        const double n = static_cast<double>(order.size());
        double t = 0.0, prev = 0.0;
        for (std::size_t k = 0; k < order.size(); ++k) {
            const auto& j = jobs_[order[k]];
            t += (n - static_cast<double>(k)) * (j.remaining - prev) / rate_;
            prev = j.remaining;
            cost += j.holding_rate * t;
        }
        return cost;
    }
    double t = 0.0;
    for (std::size_t i : order) {
        t += jobs_[i].remaining / rate_;
        cost += jobs_[i].holding_rate * t;
    }
    return cost;
}

double QueueState::work_with_product_below(double h) const {
    double u = 0.0;
    for (const auto& j : jobs_)
        if (j.remaining * j.original < h) u += j.remaining;
    return u;
}

double QueueState::work_with_remaining_below(double x) const {
    double u = 0.0;
    for (const auto& j : jobs_)
        if (j.remaining < x) u += j.remaining;
    return u;
}

std::size_t QueueState::waiting_longer_than(double x) const {
    std::size_t c = 0;
    for (const auto& j : jobs_)
        if (j.remaining > x && !(locked_ && *locked_ == j.id)) ++c;
    return c;
}

std::size_t QueueState::count_longer_than(double x) const {
    std::size_t c = 0;
    for (const auto& j : jobs_)
        if (j.remaining > x) ++c;
    return c;
}

void QueueState::swap_contents(QueueState& other) {
    if (other.discipline_ != discipline_ || other.rate_ != rate_)
        throw std::invalid_argument("contents can only be swapped between identical servers");
    jobs_.swap(other.jobs_);
    std::swap(locked_, other.locked_);
    std::swap(next_seq_, other.next_seq_);
}

}  // namespace sizeaware
