#pragma once

#include <functional>

namespace oscimark {

// Runs fn(0..n_tasks-1) across at most `workers` threads. Each task index
// writes its own output slot, so results are identical at any worker count.
// Exceptions are captured and rethrown on the calling thread.
void parallel_for(int n_tasks, int workers, const std::function<void(int)>& fn);

}  // namespace oscimark
