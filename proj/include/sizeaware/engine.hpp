#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sizeaware {

enum class Discipline { fifo, lifo, ps, spt, srpt, sptp };

std::string to_string(Discipline d);
/// Accepts "fifo", "lifo" (preemptive), "ps", "spt", "srpt", "sptp".
Discipline parse_discipline(const std::string& name);

/// Work amounts are in work units; the server drains them at its rate.
struct QueuedJob {
    std::uint64_t id = 0;
    double remaining = 0.0;
    double original = 0.0;
    double holding_rate = 1.0;
    std::uint64_t arrival_seq = 0;
};

struct Service {
    std::uint64_t id;
    double share;
};

struct Departure {
    std::uint64_t id;
    double offset;
};

struct AdvanceResult {
    std::vector<Departure> departures;
    double holding_cost = 0.0;  // integral of the sum of holding rates present
    double job_time = 0.0;      // integral of the number of jobs present
};

class QueueState {
public:
    QueueState(Discipline discipline, double rate);

    Discipline discipline() const { return discipline_; }
    double rate() const { return rate_; }
    const std::vector<QueuedJob>& jobs() const { return jobs_; }
    std::size_t size() const { return jobs_.size(); }
    bool empty() const { return jobs_.empty(); }

    double backlog() const;
    double backlog_time() const { return backlog() / rate_; }
    std::optional<std::uint64_t> locked_job() const { return locked_; }

    /// Jobs receiving service right now with their capacity shares.
    std::vector<Service> select_in_service() const;

    /// Serves for dt time units, resolving every completion exactly.
    /// dt may be +inf to drain the queue.
    AdvanceResult advance(double dt);

    /// Adds a job. Sequence numbers must increase across admissions.
    void admit(const QueuedJob& job);
    /// Adds a fresh job of the given work with an automatic id and sequence number.
    std::uint64_t admit(double size, double holding_rate);

    /// Indices into jobs() in the order the queue would finish them with no
    /// further arrivals. For SPT the locked job comes first.
    std::vector<std::size_t> priority_order() const;

    /// Sum of b_i R_i when the queue empties with no further arrivals.
    double drain_cost() const;

    double work_with_product_below(double h) const;
    double work_with_remaining_below(double x) const;
    /// Waiting (not locked) jobs with remaining work above x.
    std::size_t waiting_longer_than(double x) const;
    std::size_t count_longer_than(double x) const;

    /// Replaces the contents (used when switching the roles of identical servers).
    void swap_contents(QueueState& other);

private:
    std::size_t select_index() const;
    void refresh_lock();

    Discipline discipline_;
    double rate_;
    std::vector<QueuedJob> jobs_;
    std::optional<std::uint64_t> locked_;
    std::uint64_t next_seq_ = 0;
};

}  // namespace sizeaware
