#pragma once

namespace genolang {

// Thread count used by the OpenMP kernels. Results never depend on it.
void set_threads(int threads);
int max_threads() noexcept;
bool openmp_enabled() noexcept;

} // namespace genolang
