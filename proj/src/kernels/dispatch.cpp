#include <atomic>
#include <cstdlib>
#include <string>

#include "crl/common.hpp"
#include "crl/kernels.hpp"

namespace crl::kernels {

#if defined(CRL_HAVE_AVX2_KERNELS)
const Table& avx2_table_unchecked();
#endif

namespace {

std::atomic<const Table*> g_selected{nullptr};

bool cpu_has_avx2() {
#if defined(CRL_HAVE_AVX2_KERNELS) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Table& table_for(Backend backend) {
  if (backend == Backend::Scalar) return scalar_table();
  const Table* t = avx2_table();
  if (!t) throw DomainError("AVX2 kernels are not available on this build or CPU");
  return *t;
}

const Table& initial_choice() {
  if (const char* env = std::getenv("CRL_KERNEL"); env && *env) return table_for(parse_backend(env));
  if (const Table* t = avx2_table()) return *t;
  return scalar_table();
}

}  // namespace

const Table* avx2_table() {
#if defined(CRL_HAVE_AVX2_KERNELS)
  static const bool ok = cpu_has_avx2();
  return ok ? &avx2_table_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

bool available(Backend backend) { return backend == Backend::Scalar || avx2_table() != nullptr; }

const Table& active() {
  const Table* t = g_selected.load(std::memory_order_acquire);
  if (!t) {
    t = &initial_choice();
    g_selected.store(t, std::memory_order_release);
  }
  return *t;
}

void select(Backend backend) { g_selected.store(&table_for(backend), std::memory_order_release); }

Backend parse_backend(std::string_view name) {
  if (name == "scalar") return Backend::Scalar;
  if (name == "avx2") return Backend::Avx2;
  throw DomainError("unknown kernel backend '" + std::string(name) + "' (expected scalar or avx2)");
}

PhaseSum phase_sum(std::span<const double> turns) { return active().phase_sum(turns.data(), turns.size()); }

std::complex<double> autocorrelation(std::span<const double> re, std::span<const double> im, std::size_t lag) {
  if (re.size() != im.size()) throw DomainError("autocorrelation needs matching real and imaginary parts");
  auto s = active().autocorrelation(re.data(), im.data(), re.size(), lag);
  return {s.re, s.im};
}

std::uint64_t and_popcount(std::span<const std::uint64_t> words, std::span<const std::uint64_t> offsets,
                           std::uint64_t nbits) {
  return active().and_popcount(words.data(), words.size(), offsets.data(), offsets.size(), nbits);
}

double sorted_discrepancy(std::span<const double> sorted) {
  return active().sorted_discrepancy(sorted.data(), sorted.size());
}

}  // namespace crl::kernels
