#pragma once

#include <exception>
#include <mutex>

#include <omp.h>

namespace uvsb {

/// OpenMP loop over [0, n) that forwards the first exception thrown by a
/// body to the calling thread.
template <class Body>
void parallel_for(int n, Body&& body)
{
    std::exception_ptr error;
    std::mutex guard;
#pragma omp parallel for schedule(static)
    for (int k = 0; k < n; ++k) {
        try {
            body(k);
        } catch (...) {
            std::lock_guard lock(guard);
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

/// Same contract with dynamic scheduling, for bodies of uneven cost.
template <class Body>
void parallel_for_dynamic(int n, Body&& body)
{
    std::exception_ptr error;
    std::mutex guard;
#pragma omp parallel for schedule(dynamic, 1)
    for (int k = 0; k < n; ++k) {
        try {
            body(k);
        } catch (...) {
            std::lock_guard lock(guard);
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace uvsb
