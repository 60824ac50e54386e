#pragma once

#include <exception>

namespace carleman::detail {

// OpenMP loop that rethrows the first exception raised by any iteration.
template <class F>
void parallel_for(int n, F&& body)
{
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        try {
            body(i);
        } catch (...) {
#pragma omp critical
            if (!err)
                err = std::current_exception();
        }
    }
    if (err)
        std::rethrow_exception(err);
}

} // namespace carleman::detail
