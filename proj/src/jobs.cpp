#include "scatteropt/jobs.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "scatteropt/error.hpp"

namespace scatteropt {

namespace {

constexpr const char* kStoreFile = "jobs.json";

struct Interrupted {};

std::string format_id(std::uint64_t n) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "job-%06llu", static_cast<unsigned long long>(n));
    return buf;
}

JobRequest request_from_json(const json& j) {
    JobRequest request;
    request.dataset_id = j.at("dataset_id").get<std::string>();
    request.ranges = ranges_from_json(j.value("ranges", json::object()));
    request.samplers.clear();
    for (const auto& name : j.at("samplers")) {
        const auto kind = parse_sampler(name.get<std::string>());
        if (!kind) throw DataError("unknown sampler in job store: " + name.get<std::string>());
        request.samplers.push_back(*kind);
    }
    request.top_k = j.at("top_k").get<std::size_t>();
    request.seed = j.at("seed").get<std::uint64_t>();
    return request;
}

}  // namespace

std::string_view to_string(JobState state) {
    switch (state) {
        case JobState::Queued: return "queued";
        case JobState::Running: return "running";
        case JobState::Done: return "done";
        case JobState::Failed: return "failed";
    }
    return "?";
}

std::optional<JobState> parse_job_state(std::string_view name) {
    for (JobState s : {JobState::Queued, JobState::Running, JobState::Done, JobState::Failed})
        if (to_string(s) == name) return s;
    return std::nullopt;
}

json to_json(const Job& job) {
    json samplers = json::array();
    for (SamplerKind kind : job.request.samplers) samplers.push_back(to_string(kind));
    json j{{"id", job.id},
           {"dataset_id", job.request.dataset_id},
           {"state", to_string(job.state)},
           {"progress", {{"evaluated", job.evaluated}, {"total", job.total}}},
           {"ranges", to_json(job.request.ranges)},
           {"samplers", std::move(samplers)},
           {"top_k", job.request.top_k},
           {"seed", job.request.seed}};
    if (job.state == JobState::Failed) j["error"] = job.error;
    return j;
}

JobManager::JobManager(Registry& registry, JobManagerOptions options) : registry_(registry), options_(options) {
    load();
    const unsigned slots = std::max(1u, options_.job_slots);
    for (unsigned i = 0; i < slots; ++i)
        workers_.emplace_back([this](std::stop_token stop) { run_worker(stop); });
}

JobManager::~JobManager() {
    stopping_ = true;
    for (auto& w : workers_) w.request_stop();
    workers_.clear();
}

std::filesystem::path JobManager::store_path() const { return registry_.dir() / kStoreFile; }

std::string JobManager::submit(JobRequest request) {
    if (!registry_.contains(request.dataset_id)) throw NotFoundError("unknown dataset: " + request.dataset_id);
    if (request.samplers.empty()) throw InvalidArgument("at least one sampler is required");
    if (request.top_k == 0) throw InvalidArgument("top_k must be >= 1");
    const SweepGrid grid = SweepGrid::defaults().restrict(request.ranges);

    std::lock_guard lock(mutex_);
    Job job;
    job.id = format_id(next_id_++);
    job.total = grid.size() * request.samplers.size();
    job.request = std::move(request);
    const std::string id = job.id;
    jobs_.emplace(id, std::move(job));
    queue_.push_back(id);
    persist_locked();
    changed_.notify_all();
    return id;
}

std::optional<Job> JobManager::get(std::string_view id) const {
    std::lock_guard lock(mutex_);
    const auto it = jobs_.find(id);
    if (it == jobs_.end()) return std::nullopt;
    return it->second;
}

std::vector<Job> JobManager::list() const {
    std::lock_guard lock(mutex_);
    std::vector<Job> out;
    out.reserve(jobs_.size());
    for (const auto& [id, job] : jobs_) {
        out.push_back(job);
        out.back().result.reset();
    }
    return out;
}

std::optional<Job> JobManager::wait(std::string_view id, std::chrono::milliseconds timeout) const {
    std::unique_lock lock(mutex_);
    const auto it = jobs_.find(id);
    if (it == jobs_.end()) return std::nullopt;
    changed_.wait_for(lock, timeout, [&] { return it->second.finished(); });
    return it->second;
}

void JobManager::run_worker(std::stop_token stop) {
    for (;;) {
        std::string id;
        {
            std::unique_lock lock(mutex_);
            if (!changed_.wait(lock, stop, [&] { return !queue_.empty(); })) return;
            id = std::move(queue_.front());
            queue_.pop_front();
        }
        execute(id);
    }
}

void JobManager::execute(const std::string& id) {
    JobRequest request;
    {
        std::lock_guard lock(mutex_);
        Job& job = jobs_.at(id);
        job.state = JobState::Running;
        request = job.request;
        persist_locked();
        changed_.notify_all();
    }
    const auto finish = [&](JobState state, std::string error, std::optional<std::vector<RankedDesign>> result) {
        std::lock_guard lock(mutex_);
        Job& job = jobs_.at(id);
        job.state = state;
        job.error = std::move(error);
        if (result) job.evaluated = job.total;
        job.result = std::move(result);
        persist_locked();
        changed_.notify_all();
    };
    try {
        const auto set = registry_.get(request.dataset_id);
        SweepOptions options;
        options.ranges = request.ranges;
        options.samplers = request.samplers;
        options.top_k = request.top_k;
        options.seed = request.seed;
        options.workers = options_.workers;
        options.progress = [&](std::size_t done, std::size_t) {
            if (stopping_) throw Interrupted{};
            std::lock_guard lock(mutex_);
            Job& job = jobs_.at(id);
            // Workers report out of order; keep the counter monotone.
            job.evaluated = std::max(job.evaluated, done);
        };
        SweepResult result = sweep(*set, options);
        finish(JobState::Done, {}, std::move(result.ranked));
    } catch (const Interrupted&) {
        finish(JobState::Failed, "interrupted by shutdown", std::nullopt);
    } catch (const std::exception& e) {
        finish(JobState::Failed, e.what(), std::nullopt);
    }
}

void JobManager::persist_locked() const {
    json doc = json::array();
    for (const auto& [id, job] : jobs_) {
        json j = to_json(job);
        j["error"] = job.error;
        if (job.result) j["result"] = to_json(std::span<const RankedDesign>(*job.result), true);
        doc.push_back(std::move(j));
    }
    const auto path = store_path();
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << doc.dump(1) << '\n';
        if (!out) throw Error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

void JobManager::load() {
    const auto path = store_path();
    if (!std::filesystem::exists(path)) return;
    std::ifstream in(path);
    json doc;
    try {
        doc = json::parse(in);
        for (const auto& j : doc) {
            Job job;
            job.id = j.at("id").get<std::string>();
            job.request = request_from_json(j);
            const auto state = parse_job_state(j.at("state").get<std::string>());
            if (!state) throw DataError("unknown job state in " + path.string());
            job.state = *state;
            job.evaluated = j.at("progress").at("evaluated").get<std::size_t>();
            job.total = j.at("progress").at("total").get<std::size_t>();
            job.error = j.value("error", std::string{});
            if (j.contains("result")) {
                std::vector<RankedDesign> designs;
                for (const auto& d : j.at("result")) designs.push_back(design_from_json(d, job.request.ranges.clusters));
                job.result = std::move(designs);
            }
            if (job.state == JobState::Running) {
                job.state = JobState::Failed;
                job.error = "interrupted by shutdown";
            }
            if (job.state == JobState::Queued) {
                job.evaluated = 0;
                queue_.push_back(job.id);
            }
            if (job.id.rfind("job-", 0) == 0) {
                const std::uint64_t n = std::strtoull(job.id.c_str() + 4, nullptr, 10);
                next_id_ = std::max(next_id_, n + 1);
            }
            jobs_.emplace(job.id, std::move(job));
        }
    } catch (const json::exception& e) {
        throw DataError("corrupt job store " + path.string() + ": " + e.what());
    }
    std::sort(queue_.begin(), queue_.end());
    std::lock_guard lock(mutex_);
    persist_locked();
}

}  // namespace scatteropt
