#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "ldd/bridge/event_queue.hpp"
#include "ldd/bridge/ws_protocol.hpp"

namespace ldd {

class BindError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// WebSocket fan-out of engine snapshots plus inbound note/advance messages.
///
/// All socket work happens on one internal I/O thread. publish() only posts
/// to that thread, so the engine never waits on a client. Each client has a
/// bounded outbound queue; a client that falls max_queue frames behind is
/// disconnected.
class StateServer {
public:
    using InboundHandler = std::function<void(EngineInput)>;

    StateServer(unsigned short port, const MonotonicClock& clock, InboundHandler inbound,
                std::size_t max_queue = 16)
        : clock_(clock), inbound_(std::move(inbound)), max_queue_(max_queue), acceptor_(io_) {
        namespace net = boost::asio;
        try {
            const net::ip::tcp::endpoint ep(net::ip::tcp::v4(), port);
            acceptor_.open(ep.protocol());
            acceptor_.set_option(net::socket_base::reuse_address(true));
            acceptor_.bind(ep);
            acceptor_.listen(net::socket_base::max_listen_connections);
        } catch (const boost::system::system_error& e) {
            throw BindError("cannot listen on port " + std::to_string(port) + ": " + e.what());
        }
        port_ = acceptor_.local_endpoint().port();
        do_accept();
        thread_ = std::thread([this] { io_.run(); });
    }

    StateServer(const StateServer&) = delete;
    StateServer& operator=(const StateServer&) = delete;

    ~StateServer() { stop(); }

    void stop() {
        if (stopped_.exchange(true)) return;
        boost::asio::post(io_, [this] {
            boost::system::error_code ec;
            acceptor_.close(ec);
            for (const auto& s : sessions_) s->close();
            sessions_.clear();
            clients_ = 0;
            io_.stop();
        });
        if (thread_.joinable()) thread_.join();
    }

    unsigned short port() const { return port_; }
    std::size_t client_count() const { return clients_.load(); }
    std::uint64_t disconnected_slow_clients() const { return slow_drops_.load(); }
    std::uint64_t published() const { return published_.load(); }

    void publish(std::string json) {
        if (stopped_) return;
        auto frame = std::make_shared<const std::string>(std::move(json));
        ++published_;
        boost::asio::post(io_, [this, frame] {
            // Copy: enqueue may drop sessions from the set.
            auto targets = sessions_;
            for (const auto& s : targets) s->enqueue(frame);
        });
    }

private:
    class Session : public std::enable_shared_from_this<Session> {
    public:
        Session(boost::asio::ip::tcp::socket socket, StateServer& server)
            : ws_(std::move(socket)), server_(server) {}

        void start() {
            namespace websocket = boost::beast::websocket;
            ws_.set_option(websocket::stream_base::timeout::suggested(boost::beast::role_type::server));
            ws_.async_accept([self = shared_from_this()](boost::beast::error_code ec) {
                if (ec) return;
                self->server_.attach(self);
                self->do_read();
            });
        }

        void enqueue(std::shared_ptr<const std::string> frame) {
            if (closed_) return;
            if (queue_.size() >= server_.max_queue_) {
                ++server_.slow_drops_;
                close();
                server_.detach(shared_from_this());
                return;
            }
            queue_.push_back(std::move(frame));
            if (!writing_) do_write();
        }

        void close() {
            if (closed_) return;
            closed_ = true;
            boost::beast::error_code ec;
            boost::beast::get_lowest_layer(ws_).socket().shutdown(boost::asio::ip::tcp::socket::shutdown_both, ec);
            boost::beast::get_lowest_layer(ws_).socket().close(ec);
        }

    private:
        void do_read() {
            ws_.async_read(buffer_, [self = shared_from_this()](boost::beast::error_code ec, std::size_t) {
                if (ec) {
                    self->close();
                    self->server_.detach(self);
                    return;
                }
                const std::string text = boost::beast::buffers_to_string(self->buffer_.data());
                self->buffer_.consume(self->buffer_.size());
                try {
                    self->server_.inbound_(parse_client_message(text, self->server_.clock_.now_ms()));
                } catch (const std::exception& e) {
                    self->enqueue(std::make_shared<const std::string>(error_frame(e.what())));
                }
                self->do_read();
            });
        }

        void do_write() {
            writing_ = true;
            ws_.text(true);
            ws_.async_write(boost::asio::buffer(*queue_.front()),
                            [self = shared_from_this()](boost::beast::error_code ec, std::size_t) {
                                self->writing_ = false;
                                if (ec) {
                                    self->close();
                                    self->server_.detach(self);
                                    return;
                                }
                                self->queue_.pop_front();
                                if (!self->queue_.empty() && !self->closed_) self->do_write();
                            });
        }

        boost::beast::websocket::stream<boost::beast::tcp_stream> ws_;
        StateServer& server_;
        boost::beast::flat_buffer buffer_;
        std::deque<std::shared_ptr<const std::string>> queue_;
        bool writing_ = false;
        bool closed_ = false;
    };

    void do_accept() {
        acceptor_.async_accept([this](boost::beast::error_code ec, boost::asio::ip::tcp::socket socket) {
            if (ec) return;  // acceptor closed
            std::make_shared<Session>(std::move(socket), *this)->start();
            do_accept();
        });
    }

    void attach(const std::shared_ptr<Session>& s) {
        sessions_.insert(s);
        clients_ = sessions_.size();
    }

    void detach(const std::shared_ptr<Session>& s) {
        sessions_.erase(s);
        clients_ = sessions_.size();
    }

    const MonotonicClock& clock_;
    InboundHandler inbound_;
    std::size_t max_queue_;
    boost::asio::io_context io_;
    boost::asio::ip::tcp::acceptor acceptor_;
    std::set<std::shared_ptr<Session>> sessions_;  // I/O thread only
    std::thread thread_;
    unsigned short port_ = 0;
    std::atomic<bool> stopped_{false};
    std::atomic<std::size_t> clients_{0};
    std::atomic<std::uint64_t> slow_drops_{0};
    std::atomic<std::uint64_t> published_{0};
};

}  // namespace ldd
