#pragma once

#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "fedtab/transport.hpp"

namespace fedtab {

// Runs fn(party_id) on one thread per party over the given network. All
// parties are registered before any thread starts so deadlock detection never
// fires on a slow starter; a throwing party unregisters, which unblocks
// everyone else via the all-blocked check.
template <typename F>
auto run_parties(SimNetwork& net, F&& fn)
    -> std::vector<decltype(fn(1))> {
    using R = decltype(fn(1));
    const int n = net.parties();
    for (int id = 1; id <= n; ++id) net.register_party(id);

    std::vector<std::optional<R>> results(static_cast<std::size_t>(n));
    std::mutex err_mu;
    std::exception_ptr first_error;

    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n));
    for (int id = 1; id <= n; ++id) {
        threads.emplace_back([&, id] {
            try {
                results[static_cast<std::size_t>(id - 1)] = fn(id);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!first_error) first_error = std::current_exception();
            }
            net.unregister_party(id);
        });
    }
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);

    std::vector<R> out;
    out.reserve(static_cast<std::size_t>(n));
    for (auto& r : results) out.push_back(std::move(*r));
    return out;
}

}  // namespace fedtab
