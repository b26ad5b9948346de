#include <cstdlib>
#include <string>

#include "actionswitch/kernels.hpp"
#include "kernels_internal.hpp"

namespace actionswitch::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(ASW_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& pick() {
  if (const char* env = std::getenv("ASW_KERNELS")) {
    const std::string want(env);
    if (want != "auto" && !want.empty()) {
      if (const KernelTable* t = find_table(want)) return *t;
      // unknown or unsupported request falls through to auto
    }
  }
  return *available_tables().back();
}

}  // namespace

std::vector<const KernelTable*> available_tables() {
  std::vector<const KernelTable*> out{&scalar_table()};
#if defined(ASW_HAVE_AVX2)
  if (cpu_has_avx2()) out.push_back(&avx2_table());
#endif
#if defined(ASW_HAVE_NEON)
  out.push_back(&neon_table());
#endif
  return out;
}

const KernelTable* find_table(std::string_view name) {
  for (const KernelTable* t : available_tables()) {
    if (t->name == name) return t;
  }
  return nullptr;
}

const KernelTable& active() {
  static const KernelTable& table = pick();
  return table;
}

}  // namespace actionswitch::kernels
