#include <cstdlib>
#include <cstring>

#include "walrex/kernels.hpp"

namespace walrex::kernels {
namespace {

enum class Pick { Scalar, Avx2 };

Pick resolve() {
    const char* req = std::getenv("WALREX_SIMD");
    bool want_scalar = req && std::strcmp(req, "scalar") == 0;
    bool want_avx2 = req && std::strcmp(req, "avx2") == 0;
    if (want_scalar) return Pick::Scalar;
#if defined(WALREX_HAVE_AVX2)
    bool cpu_ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    if (cpu_ok && (want_avx2 || req == nullptr || std::strcmp(req, "auto") == 0))
        return Pick::Avx2;
#endif
    (void)want_avx2;
    return Pick::Scalar;
}

Pick active() {
    static const Pick p = resolve();
    return p;
}

}  // namespace

#if !defined(WALREX_HAVE_AVX2)
const Ops* avx2_ops() { return nullptr; }
#endif

const Ops& ops() {
    return active() == Pick::Avx2 ? *avx2_ops() : scalar_ops();
}

bool avx2_active() { return active() == Pick::Avx2; }

std::string active_name() { return avx2_active() ? "avx2" : "scalar"; }

}  // namespace walrex::kernels
