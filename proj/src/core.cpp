#include "phaselab/error.hpp"
#include "phaselab/parallel.hpp"
#include "phaselab/types.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace phaselab {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidDistribution: return "InvalidDistribution";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NotSymmetric: return "NotSymmetric";
        case ErrorCode::InvalidExponent: return "InvalidExponent";
        case ErrorCode::EigenFailure: return "EigenFailure";
        case ErrorCode::DegenerateSample: return "DegenerateSample";
        case ErrorCode::DegenerateSet: return "DegenerateSet";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::EquivalentTargets: return "EquivalentTargets";
        case ErrorCode::ZeroPerturbation: return "ZeroPerturbation";
        case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

std::string_view to_string(Field field) {
    return field == Field::Real ? "real" : "complex";
}

Field field_from_string(std::string_view name) {
    if (name == "real") return Field::Real;
    if (name == "complex") return Field::Complex;
    throw Error(ErrorCode::ConfigError, "unknown field '" + std::string(name) + "'");
}

bool is_real_valued(const Vector& x) {
    return (x.imag().array() == 0.0).all();
}

bool is_real_valued(const Matrix& x) {
    return (x.imag().array() == 0.0).all();
}

bool is_hermitian(const Matrix& x, double rel_tol) {
    if (x.rows() != x.cols()) return false;
    const double scale = std::max(1.0, x.norm());
    return (x - x.adjoint()).norm() <= rel_tol * scale;
}

namespace {
std::atomic<unsigned> g_threads{0};
// Nested parallel_for calls run serially inside a worker.
thread_local bool t_inside_worker = false;
}

void set_thread_count(unsigned threads) { g_threads = threads; }

unsigned thread_count() {
    const unsigned t = g_threads.load();
    if (t != 0) return t;
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = t_inside_worker ? 1 : std::min<std::size_t>(thread_count(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        t_inside_worker = true;
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = count;
                return;
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace phaselab
