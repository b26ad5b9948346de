#pragma once

#include "actionswitch/kernels.hpp"

namespace actionswitch::kernels {

#if defined(ASW_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

#if defined(ASW_HAVE_NEON)
const KernelTable& neon_table();
#endif

}  // namespace actionswitch::kernels
