// Copyright (C) 2026 tfapprox contributors
// SPDX-License-Identifier: Apache-2.0
//
#include <atomic>

#include "tfa/simd/kernels.hpp"

namespace tfa::simd {

#if defined(TFA_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

namespace {
std::atomic<Variant> forced{Variant::automatic};
}

bool avx2_available() {
#if defined(TFA_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
    static const bool ok = __builtin_cpu_supports("avx2");
    return ok;
#else
    return false;
#endif
}

const KernelTable* avx2_kernels() {
#if defined(TFA_HAVE_AVX2)
    if (avx2_available())
        return &avx2_table();
#endif
    return nullptr;
}

const KernelTable& active() {
    Variant v = forced.load(std::memory_order_relaxed);
    if (v == Variant::scalar)
        return scalar_kernels();
    if (const KernelTable* t = avx2_kernels())
        return *t;
    return scalar_kernels();
}

void force_variant(Variant v) { forced.store(v, std::memory_order_relaxed); }

Variant current_variant() { return forced.load(std::memory_order_relaxed); }

}  // namespace tfa::simd
