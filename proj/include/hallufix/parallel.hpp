#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace hallufix {

// Worker cap: set_thread_cap (CLI --threads) wins, then HALLUFIX_THREADS,
// then hardware concurrency.
void set_thread_cap(int n);
int thread_cap();

// Runs fn(i) for i in [0, n) on up to thread_cap() threads. Each index must
// write only its own output slot; callers reduce serially afterwards so
// results do not depend on the thread count.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace hallufix
