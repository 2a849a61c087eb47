#include "alid/memtrack.hpp"

#include <atomic>
#include <cstdlib>
#include <malloc.h>
#include <new>

namespace {

std::atomic<std::uint64_t> g_current{0};
std::atomic<std::uint64_t> g_peak{0};

void add_bytes(std::size_t sz) {
    const std::uint64_t cur = g_current.fetch_add(sz, std::memory_order_relaxed) + sz;
    std::uint64_t peak = g_peak.load(std::memory_order_relaxed);
    while (cur > peak && !g_peak.compare_exchange_weak(peak, cur, std::memory_order_relaxed)) {
    }
}

void sub_bytes(std::size_t sz) {
    g_current.fetch_sub(sz, std::memory_order_relaxed);
}

void* tracked_alloc(std::size_t sz) {
    void* p = std::malloc(sz ? sz : 1);
    if (!p) throw std::bad_alloc();
    add_bytes(malloc_usable_size(p));
    return p;
}

void tracked_free(void* p) noexcept {
    if (!p) return;
    sub_bytes(malloc_usable_size(p));
    std::free(p);
}

} // namespace

namespace alid::mem {

std::uint64_t current_bytes() { return g_current.load(std::memory_order_relaxed); }
std::uint64_t peak_bytes() { return g_peak.load(std::memory_order_relaxed); }
void reset_peak() { g_peak.store(g_current.load(std::memory_order_relaxed), std::memory_order_relaxed); }

} // namespace alid::mem

void* operator new(std::size_t sz) { return tracked_alloc(sz); }
void* operator new[](std::size_t sz) { return tracked_alloc(sz); }
void* operator new(std::size_t sz, const std::nothrow_t&) noexcept {
    void* p = std::malloc(sz ? sz : 1);
    if (p) add_bytes(malloc_usable_size(p));
    return p;
}
void* operator new[](std::size_t sz, const std::nothrow_t&) noexcept {
    void* p = std::malloc(sz ? sz : 1);
    if (p) add_bytes(malloc_usable_size(p));
    return p;
}

void operator delete(void* p) noexcept { tracked_free(p); }
void operator delete[](void* p) noexcept { tracked_free(p); }
void operator delete(void* p, std::size_t) noexcept { tracked_free(p); }
void operator delete[](void* p, std::size_t) noexcept { tracked_free(p); }
void operator delete(void* p, const std::nothrow_t&) noexcept { tracked_free(p); }
void operator delete[](void* p, const std::nothrow_t&) noexcept { tracked_free(p); }
