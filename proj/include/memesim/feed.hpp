#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace memesim {

using MemeId = std::uint64_t;
using Step = std::int64_t;

struct Message {
    MemeId meme_id = 0;
    Step created_step = 0;

    bool operator==(const Message&) const = default;
};

/// Bounded newest-first FIFO. Index 0 is the most recent message; pushing
/// onto a full feed forgets the oldest.
class Feed {
public:
    explicit Feed(std::size_t capacity = 1)
        : buf_(capacity)
    {
        assert(capacity >= 1);
    }

    std::size_t capacity() const noexcept { return buf_.size(); }
    std::size_t size() const noexcept { return size_; }
    bool empty() const noexcept { return size_ == 0; }
    bool full() const noexcept { return size_ == buf_.size(); }

    /// i-th newest message, i < size().
    const Message& operator[](std::size_t i) const noexcept
    {
        assert(i < size_);
        std::size_t pos = head_ + buf_.size() - 1 - i;
        if (pos >= buf_.size())
            pos -= buf_.size();
        return buf_[pos];
    }

    const Message& newest() const noexcept { return (*this)[0]; }
    const Message& oldest() const noexcept { return (*this)[size_ - 1]; }

    /// Prepends a message; returns the evicted one when the feed was full.
    std::optional<Message> push(const Message& m) noexcept
    {
        std::optional<Message> evicted;
        if (size_ == buf_.size())
            evicted = buf_[head_];
        else
            ++size_;
        buf_[head_] = m;
        if (++head_ == buf_.size())
            head_ = 0;
        return evicted;
    }

    void clear() noexcept
    {
        head_ = 0;
        size_ = 0;
    }

private:
    // head_ is the slot the next message goes into; the slot after the
    // newest one, wrapping. When full it also holds the oldest message.
    std::vector<Message> buf_;
    std::size_t head_ = 0;
    std::size_t size_ = 0;
};

} // namespace memesim
