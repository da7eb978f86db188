#pragma once

#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/udp.hpp>
#include <charconv>
#include <stdexcept>
#include <string>
#include <vector>

#include "ldd/bridge/osc.hpp"

namespace ldd {

struct HostPort {
    std::string host;
    unsigned short port = 0;
};

/// Parses "host:port" (the last colon separates the port).
inline HostPort parse_host_port(const std::string& text) {
    const auto colon = text.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
        throw std::invalid_argument("expected host:port, got '" + text + "'");
    }
    HostPort hp;
    hp.host = text.substr(0, colon);
    const char* first = text.data() + colon + 1;
    const char* last = text.data() + text.size();
    unsigned long port = 0;
    auto [ptr, ec] = std::from_chars(first, last, port);
    if (ec != std::errc{} || ptr != last || port == 0 || port > 65535) {
        throw std::invalid_argument("bad port in '" + text + "'");
    }
    hp.port = static_cast<unsigned short>(port);
    return hp;
}

/// Fire-and-forget OSC over UDP. Sends are non-blocking; datagrams that
/// cannot be queued by the kernel are dropped.
class OscSender {
public:
    explicit OscSender(const HostPort& dest) : socket_(io_) {
        boost::asio::ip::udp::resolver resolver(io_);
        endpoint_ = *resolver.resolve(boost::asio::ip::udp::v4(), dest.host, std::to_string(dest.port)).begin();
        socket_.open(boost::asio::ip::udp::v4());
        socket_.non_blocking(true);
    }

    std::size_t send(const std::vector<osc::Packet>& packets) {
        std::size_t sent = 0;
        for (const auto& p : packets) {
            boost::system::error_code ec;
            socket_.send_to(boost::asio::buffer(p), endpoint_, 0, ec);
            if (!ec) ++sent;
        }
        return sent;
    }

    const boost::asio::ip::udp::endpoint& endpoint() const { return endpoint_; }

private:
    boost::asio::io_context io_;
    boost::asio::ip::udp::socket socket_;
    boost::asio::ip::udp::endpoint endpoint_;
};

}  // namespace ldd
