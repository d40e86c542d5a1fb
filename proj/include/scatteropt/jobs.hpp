#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "scatteropt/optimizer.hpp"
#include "scatteropt/registry.hpp"
#include "scatteropt/serialize.hpp"

namespace scatteropt {

enum class JobState { Queued, Running, Done, Failed };

std::string_view to_string(JobState state);
std::optional<JobState> parse_job_state(std::string_view name);

struct JobRequest {
    std::string dataset_id;
    SweepRanges ranges;
    std::vector<SamplerKind> samplers{kAllSamplers.begin(), kAllSamplers.end()};
    std::size_t top_k = kDefaultTopK;
    std::uint64_t seed = kDefaultSeed;
};

struct Job {
    std::string id;
    JobRequest request;
    JobState state = JobState::Queued;
    std::size_t evaluated = 0;
    std::size_t total = 0;
    std::string error;                               ///< set when failed
    std::optional<std::vector<RankedDesign>> result;  ///< set when done

    bool finished() const { return state == JobState::Done || state == JobState::Failed; }
};

/// JSON view of a job without its result.
json to_json(const Job& job);

struct JobManagerOptions {
    unsigned job_slots = 1;  ///< sweeps running at once
    unsigned workers = 0;    ///< threads per sweep; 0 = hardware concurrency
};

/// Queue of sweep jobs executed in the background. The job table is
/// persisted to `jobs.json` in the registry directory on every state change.
/// On construction, stored queued jobs are re-queued and jobs that were
/// running when the previous process ended are marked failed.
class JobManager {
public:
    JobManager(Registry& registry, JobManagerOptions options = {});
    ~JobManager();

    JobManager(const JobManager&) = delete;
    JobManager& operator=(const JobManager&) = delete;

    /// Validates and enqueues. Throws NotFoundError for an unknown dataset
    /// and InvalidArgument for invalid ranges, samplers or top_k.
    std::string submit(JobRequest request);

    std::optional<Job> get(std::string_view id) const;
    std::vector<Job> list() const;

    /// Blocks until the job finishes or the timeout elapses; returns the
    /// latest snapshot (nullopt for an unknown id).
    std::optional<Job> wait(std::string_view id, std::chrono::milliseconds timeout) const;

    std::filesystem::path store_path() const;

private:
    void run_worker(std::stop_token stop);
    void execute(const std::string& id);
    void persist_locked() const;
    void load();

    Registry& registry_;
    JobManagerOptions options_;
    mutable std::mutex mutex_;
    mutable std::condition_variable_any changed_;
    std::map<std::string, Job, std::less<>> jobs_;
    std::deque<std::string> queue_;
    std::uint64_t next_id_ = 1;
    std::atomic<bool> stopping_{false};
    std::vector<std::jthread> workers_;
};

}  // namespace scatteropt
