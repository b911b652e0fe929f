#pragma once

#include <atomic>
#include <cstddef>
#include <memory>
#include <new>

namespace toposnake {

/// Process-wide byte counters for field storage. Lets tests audit how much
/// per-pixel memory a solver keeps alive.
class MemoryStats {
 public:
  static MemoryStats& instance() noexcept {
    static MemoryStats stats;
    return stats;
  }

  void on_allocate(std::size_t bytes) noexcept {
    const std::size_t now = live_.fetch_add(bytes, std::memory_order_relaxed) + bytes;
    std::size_t peak = peak_.load(std::memory_order_relaxed);
    while (now > peak && !peak_.compare_exchange_weak(peak, now, std::memory_order_relaxed)) {
    }
  }
  void on_deallocate(std::size_t bytes) noexcept {
    live_.fetch_sub(bytes, std::memory_order_relaxed);
  }

  [[nodiscard]] std::size_t live_bytes() const noexcept { return live_.load(); }
  [[nodiscard]] std::size_t peak_bytes() const noexcept { return peak_.load(); }
  /// Restart peak tracking from the current live level.
  void reset_peak() noexcept { peak_.store(live_.load()); }

 private:
  std::atomic<std::size_t> live_{0};
  std::atomic<std::size_t> peak_{0};
};

template <class T>
struct TrackingAllocator {
  using value_type = T;

  TrackingAllocator() noexcept = default;
  template <class U>
  TrackingAllocator(const TrackingAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    T* p = std::allocator<T>{}.allocate(n);
    MemoryStats::instance().on_allocate(n * sizeof(T));
    return p;
  }
  void deallocate(T* p, std::size_t n) noexcept {
    MemoryStats::instance().on_deallocate(n * sizeof(T));
    std::allocator<T>{}.deallocate(p, n);
  }

  template <class U>
  friend bool operator==(const TrackingAllocator&, const TrackingAllocator<U>&) noexcept {
    return true;
  }
};

}  // namespace toposnake
