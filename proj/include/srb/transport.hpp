#ifndef SRB_TRANSPORT_HPP
#define SRB_TRANSPORT_HPP

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <cstring>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "srb/codec.hpp"
#include "srb/error.hpp"

namespace srb {

inline int64_t steady_now_ns() {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

inline int64_t system_now_ns() {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

struct RawFrame {
    std::vector<uint8_t> bytes;
    int64_t arrival_ns = 0; // steady clock, stamped at enqueue
};

// Thread-safe bounded frame queue; receiver threads enqueue, the owner
// thread drains during spin. Drop-oldest on overflow.
class InboundQueue {
public:
    explicit InboundQueue(size_t capacity = 1024) : capacity_(capacity) {}

    void push(std::vector<uint8_t> bytes) {
        std::lock_guard<std::mutex> lock(mutex_);
        if (frames_.size() >= capacity_) {
            frames_.pop_front();
            dropped_++;
        }
        frames_.push_back(RawFrame{std::move(bytes), steady_now_ns()});
    }

    std::vector<RawFrame> drain() {
        std::lock_guard<std::mutex> lock(mutex_);
        std::vector<RawFrame> out(frames_.begin(), frames_.end());
        frames_.clear();
        return out;
    }

    size_t size() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return frames_.size();
    }

    uint64_t dropped() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return dropped_;
    }

private:
    mutable std::mutex mutex_;
    std::deque<RawFrame> frames_;
    size_t capacity_;
    uint64_t dropped_ = 0;
};

// A peer is anything that accepts encoded frames.
class Peer {
public:
    virtual ~Peer() = default;
    virtual void send(const std::vector<uint8_t>& frame) = 0;
    virtual bool alive() const { return true; }
};

// Direct in-process peering: frames land in the other endpoint's inbound
// queue, exactly as they would off the wire.
class LocalPeer : public Peer {
public:
    explicit LocalPeer(InboundQueue& target) : target_(target) {}

    void send(const std::vector<uint8_t>& frame) override { target_.push(frame); }

private:
    InboundQueue& target_;
};

namespace detail {

inline void close_fd(int fd) {
    if (fd >= 0) ::close(fd);
}

inline void send_all(int fd, const uint8_t* data, size_t size) {
    size_t sent = 0;
    while (sent < size) {
        ssize_t n = ::send(fd, data + sent, size - sent, MSG_NOSIGNAL);
        if (n <= 0) {
            throw Error(errc::transport, "send failed: " + std::string(std::strerror(errno)));
        }
        sent += static_cast<size_t>(n);
    }
}

// Splits a byte stream into frames; resynchronizes at the next magic after
// garbage. Complete frames go to on_frame, framing gaps to on_garbage.
class FrameSplitter {
public:
    std::function<void(std::vector<uint8_t>)> on_frame;
    std::function<void()> on_garbage;

    void feed(const uint8_t* data, size_t size) {
        buffer_.insert(buffer_.end(), data, data + size);
        while (true) {
            if (buffer_.size() < 4) return;
            size_t start = find_magic(buffer_.data(), buffer_.size(), 0);
            if (start > 0) {
                if (on_garbage) on_garbage();
                buffer_.erase(buffer_.begin(),
                              buffer_.begin() + static_cast<ptrdiff_t>(
                                                    std::min(start, buffer_.size())));
                if (buffer_.size() < 4) return;
            }
            // header: magic(4) version(1) tag(1) topic_len(2)
            if (buffer_.size() < 8) return;
            uint16_t topic_len = static_cast<uint16_t>(buffer_[6] | (buffer_[7] << 8));
            size_t payload_len_off = 8 + topic_len;
            if (buffer_.size() < payload_len_off + 4) return;
            uint32_t payload_len = 0;
            for (int i = 0; i < 4; ++i) {
                payload_len |= static_cast<uint32_t>(buffer_[payload_len_off + i]) << (8 * i);
            }
            size_t total = payload_len_off + 4 + payload_len;
            if (buffer_.size() < total) return;
            std::vector<uint8_t> frame(buffer_.begin(),
                                       buffer_.begin() + static_cast<ptrdiff_t>(total));
            buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<ptrdiff_t>(total));
            if (on_frame) on_frame(std::move(frame));
        }
    }

private:
    std::vector<uint8_t> buffer_;
};

} // namespace detail

// One TCP connection: writes frames from the owner thread, reads frames on a
// dedicated receiver thread that only enqueues into the inbound queue.
class TcpPeer : public Peer {
public:
    TcpPeer(int fd, InboundQueue& inbound, std::atomic<uint64_t>& framing_errors)
        : fd_(fd), alive_(true) {
        int flag = 1;
        ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &flag, sizeof(flag));
        receiver_ = std::thread([this, &inbound, &framing_errors] {
            detail::FrameSplitter splitter;
            splitter.on_frame = [&inbound](std::vector<uint8_t> frame) {
                inbound.push(std::move(frame));
            };
            splitter.on_garbage = [&framing_errors] { framing_errors++; };
            std::vector<uint8_t> buf(64 * 1024);
            while (true) {
                ssize_t n = ::recv(fd_, buf.data(), buf.size(), 0);
                if (n <= 0) break;
                splitter.feed(buf.data(), static_cast<size_t>(n));
            }
            alive_ = false;
        });
    }

    ~TcpPeer() override {
        ::shutdown(fd_, SHUT_RDWR);
        if (receiver_.joinable()) receiver_.join();
        detail::close_fd(fd_);
    }

    void send(const std::vector<uint8_t>& frame) override {
        std::lock_guard<std::mutex> lock(write_mutex_);
        detail::send_all(fd_, frame.data(), frame.size());
    }

    bool alive() const override { return alive_; }

private:
    int fd_;
    std::atomic<bool> alive_;
    std::mutex write_mutex_;
    std::thread receiver_;
};

inline int tcp_connect(const std::string& host, uint16_t port) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) {
        throw Error(errc::transport, "socket: " + std::string(std::strerror(errno)));
    }
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        hostent* he = ::gethostbyname(host.c_str());
        if (!he || he->h_addrtype != AF_INET) {
            detail::close_fd(fd);
            throw Error(errc::transport, "cannot resolve host: " + host);
        }
        std::memcpy(&addr.sin_addr, he->h_addr_list[0], sizeof(addr.sin_addr));
    }
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        detail::close_fd(fd);
        throw Error(errc::transport,
                    "connect to " + host + ":" + std::to_string(port) + " failed: " +
                        std::string(std::strerror(errno)));
    }
    return fd;
}

// Accepts connections and hands each resulting peer to the callback.
class TcpListener {
public:
    TcpListener(const std::string& host, uint16_t port,
                std::function<void(std::shared_ptr<Peer>)> on_peer, InboundQueue& inbound,
                std::atomic<uint64_t>& framing_errors) {
        fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd_ < 0) {
            throw Error(errc::transport, "socket: " + std::string(std::strerror(errno)));
        }
        int reuse = 1;
        ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &reuse, sizeof(reuse));
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_port = htons(port);
        if (host.empty() || host == "0.0.0.0") {
            addr.sin_addr.s_addr = INADDR_ANY;
        } else if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
            detail::close_fd(fd_);
            throw Error(errc::transport, "invalid listen address: " + host);
        }
        if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
            ::listen(fd_, 16) != 0) {
            detail::close_fd(fd_);
            throw Error(errc::transport, "bind/listen on " + host + ":" + std::to_string(port) +
                                             " failed: " + std::string(std::strerror(errno)));
        }
        sockaddr_in bound{};
        socklen_t len = sizeof(bound);
        ::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len);
        port_ = ntohs(bound.sin_port);
        acceptor_ = std::thread([this, on_peer = std::move(on_peer), &inbound, &framing_errors] {
            while (!stopping_) {
                int client = ::accept(fd_, nullptr, nullptr);
                if (client < 0) break;
                on_peer(std::make_shared<TcpPeer>(client, inbound, framing_errors));
            }
        });
    }

    ~TcpListener() {
        stopping_ = true;
        ::shutdown(fd_, SHUT_RDWR);
        detail::close_fd(fd_);
        if (acceptor_.joinable()) acceptor_.join();
    }

    uint16_t port() const { return port_; }

private:
    int fd_ = -1;
    uint16_t port_ = 0;
    std::atomic<bool> stopping_{false};
    std::thread acceptor_;
};

// "host:port" -> pair
inline std::pair<std::string, uint16_t> parse_address(const std::string& address) {
    auto colon = address.rfind(':');
    if (colon == std::string::npos) {
        throw Error(errc::invalid_input, "address must be host:port, got '" + address + "'");
    }
    std::string host = address.substr(0, colon);
    int port = 0;
    try {
        port = std::stoi(address.substr(colon + 1));
    } catch (const std::exception&) {
        throw Error(errc::invalid_input, "invalid port in address '" + address + "'");
    }
    if (port < 0 || port > 65535) {
        throw Error(errc::invalid_input, "port out of range in '" + address + "'");
    }
    return {host.empty() ? "127.0.0.1" : host, static_cast<uint16_t>(port)};
}

} // namespace srb

#endif
