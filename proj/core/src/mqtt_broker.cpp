#include "storetwin/mqtt/broker.hpp"

#include <sys/socket.h>
#include <sys/time.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <list>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <thread>
#include <unordered_map>
#include <vector>

#include "net.hpp"
#include "storetwin/mqtt/codec.hpp"
#include "storetwin/mqtt/topic.hpp"

namespace storetwin::mqtt {

namespace {

using Clock = std::chrono::steady_clock;
using namespace std::chrono_literals;

constexpr auto kPollSlice = 50ms;

struct Outbound {
    Bytes bytes;
    bool droppable = true;  // qos 0 publishes
};

struct Session {
    explicit Session(net::Socket s) : sock(std::move(s)) {}

    net::Socket sock;
    std::string client_id;

    std::mutex sub_mu;
    std::vector<std::pair<TopicFilter, std::uint8_t>> subs;

    std::mutex q_mu;
    std::condition_variable q_cv;
    std::deque<Outbound> queue;
    bool draining = false;
    std::uint16_t next_packet_id = 1;

    std::atomic<bool> aborted{false};

    /// Highest granted qos over matching filters, or nullopt.
    std::optional<std::uint8_t> match(std::string_view topic) {
        std::lock_guard lock(sub_mu);
        std::optional<std::uint8_t> best;
        for (const auto& [filter, qos] : subs)
            if (topic_matches(filter, topic)) best = std::max<std::uint8_t>(best.value_or(0), qos);
        return best;
    }

    std::uint16_t take_packet_id() {
        const auto id = next_packet_id;
        next_packet_id = next_packet_id == 0xFFFF ? 1 : static_cast<std::uint16_t>(id + 1);
        return id;
    }

    void abort() {
        aborted = true;
        {
            std::lock_guard lock(q_mu);
            draining = true;
        }
        q_cv.notify_all();
        sock.shutdown();
    }
};

struct Connection {
    std::shared_ptr<Session> session;
    std::thread thread;
    std::atomic<bool> done{false};
};

}  // namespace

struct Broker::Impl {
    explicit Impl(BrokerOptions o) : options(std::move(o)) {}

    BrokerOptions options;
    net::Socket listener;
    std::uint16_t bound_port = 0;
    std::atomic<bool> stopping{false};
    std::thread accept_thread;

    mutable std::shared_mutex registry_mu;
    std::unordered_map<std::string, std::shared_ptr<Session>> registry;

    std::mutex retained_mu;
    std::map<std::string, Publish> retained;

    std::mutex conns_mu;
    std::list<std::unique_ptr<Connection>> conns;

    std::atomic<std::uint64_t> connections_accepted{0};
    std::atomic<std::uint64_t> publishes_received{0};
    std::atomic<std::uint64_t> messages_delivered{0};
    std::atomic<std::uint64_t> messages_dropped{0};
    std::atomic<std::uint64_t> keepalive_expiries{0};
    std::atomic<std::uint64_t> protocol_errors{0};
    std::atomic<std::uint64_t> auto_ids{0};

    void bind() {
        if (listener.valid()) return;
        listener = net::listen_tcp(options.bind_address, options.port);
        bound_port = net::local_port(listener);
    }

    void enqueue(Session& s, Bytes bytes, bool droppable) {
        {
            std::lock_guard lock(s.q_mu);
            if (s.draining) return;
            if (s.queue.size() >= options.max_queue_per_client) {
                auto victim = std::find_if(s.queue.begin(), s.queue.end(),
                                           [](const Outbound& o) { return o.droppable; });
                if (victim == s.queue.end()) victim = s.queue.begin();
                s.queue.erase(victim);
                ++messages_dropped;
            }
            s.queue.push_back({std::move(bytes), droppable});
        }
        s.q_cv.notify_one();
    }

    void deliver(Session& s, const Publish& p, std::uint8_t qos, bool retain) {
        Publish out = p;
        out.qos = qos;
        out.retain = retain;
        out.dup = false;
        out.packet_id.reset();
        if (qos == 1) {
            std::lock_guard lock(s.q_mu);
            out.packet_id = s.take_packet_id();
        }
        enqueue(s, encode_packet(out), qos == 0);
        ++messages_delivered;
    }

    void route(const Publish& p) {
        std::shared_lock lock(registry_mu);
        for (const auto& [id, session] : registry) {
            if (const auto granted = session->match(p.topic))
                deliver(*session, p, std::min(p.qos, *granted), false);
        }
    }

    void store_retained(const Publish& p) {
        std::lock_guard lock(retained_mu);
        if (p.payload.empty()) {
            retained.erase(p.topic);
        } else {
            retained[p.topic] = p;
        }
    }

    void send_retained(Session& s, const TopicFilter& filter, std::uint8_t granted) {
        std::lock_guard lock(retained_mu);
        for (const auto& [topic, msg] : retained)
            if (topic_matches(filter, topic)) deliver(s, msg, std::min(msg.qos, granted), true);
    }

    void register_session(const std::shared_ptr<Session>& s) {
        std::shared_ptr<Session> older;
        {
            std::unique_lock lock(registry_mu);
            auto& slot = registry[s->client_id];
            older = std::move(slot);
            slot = s;
        }
        if (older) older->abort();
    }

    void unregister_session(const std::shared_ptr<Session>& s) {
        std::unique_lock lock(registry_mu);
        auto it = registry.find(s->client_id);
        if (it != registry.end() && it->second == s) registry.erase(it);
    }

    static void writer_loop(Session& s) {
        while (true) {
            Outbound next;
            {
                std::unique_lock lock(s.q_mu);
                s.q_cv.wait(lock, [&] { return !s.queue.empty() || s.draining; });
                if (s.queue.empty() || s.aborted) return;
                next = std::move(s.queue.front());
                s.queue.pop_front();
            }
            if (!net::send_all(s.sock, next.bytes)) {
                s.abort();
                return;
            }
        }
    }

    void run_connection(const std::shared_ptr<Session>& s) {
        timeval tv{2, 0};
        ::setsockopt(s->sock.fd(), SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
        std::thread writer([s] { writer_loop(*s); });

        bool connected = false;
        bool clean_disconnect = false;
        std::optional<Will> will;
        std::uint16_t keep_alive_s = 0;
        const auto started = Clock::now();
        auto last_activity = started;
        Bytes buffer;
        std::uint8_t chunk[4096];

        auto protocol_error = [&] { ++protocol_errors; };

        bool open = true;
        while (open && !stopping && !s->aborted) {
            std::optional<Clock::time_point> deadline;
            if (!connected) {
                deadline = started + std::chrono::duration_cast<Clock::duration>(
                                         std::chrono::duration<double>(options.connect_timeout_s));
            } else if (keep_alive_s > 0) {
                deadline = last_activity + std::chrono::milliseconds(1500LL * keep_alive_s);
            }
            const auto now = Clock::now();
            if (deadline && now >= *deadline) {
                if (connected) ++keepalive_expiries;
                break;
            }
            auto wait = std::chrono::duration_cast<std::chrono::milliseconds>(kPollSlice);
            if (deadline)
                wait = std::min(wait, std::chrono::duration_cast<std::chrono::milliseconds>(
                                          *deadline - now) + 1ms);
            const auto ready = net::wait_readable(s->sock, wait);
            if (ready == net::WaitResult::Timeout) continue;
            if (ready == net::WaitResult::Error) break;
            const long n = net::recv_some(s->sock, chunk);
            if (n <= 0) break;
            last_activity = Clock::now();
            buffer.insert(buffer.end(), chunk, chunk + n);

            std::size_t offset = 0;
            while (open) {
                const auto res = decode_packet(std::span(buffer).subspan(offset));
                if (res.status == DecodeStatus::NeedMoreBytes) break;
                if (res.status == DecodeStatus::Malformed) {
                    protocol_error();
                    open = false;
                    break;
                }
                offset += res.consumed;
                const Packet& packet = *res.packet;

                if (!connected) {
                    const auto* c = std::get_if<Connect>(&packet);
                    if (c == nullptr) {
                        protocol_error();
                        open = false;
                        break;
                    }
                    if (c->client_id.empty() && !c->clean_session) {
                        enqueue(*s, encode_packet(Connack{false, ConnectReturnCode::IdentifierRejected}),
                                false);
                        open = false;
                        break;
                    }
                    s->client_id = c->client_id.empty()
                                       ? "auto-" + std::to_string(++auto_ids)
                                       : c->client_id;
                    keep_alive_s = c->keep_alive_s;
                    will = c->will;
                    register_session(s);
                    connected = true;
                    enqueue(*s, encode_packet(Connack{false, ConnectReturnCode::Accepted}), false);
                    continue;
                }

                std::visit(
                    [&](const auto& p) {
                        using T = std::decay_t<decltype(p)>;
                        if constexpr (std::is_same_v<T, Publish>) {
                            ++publishes_received;
                            if (p.retain) store_retained(p);
                            route(p);
                            if (p.qos == 1)
                                enqueue(*s, encode_packet(Puback{*p.packet_id}), false);
                        } else if constexpr (std::is_same_v<T, Subscribe>) {
                            Suback ack{p.packet_id, {}};
                            std::vector<std::pair<TopicFilter, std::uint8_t>> added;
                            {
                                std::lock_guard lock(s->sub_mu);
                                for (const auto& sub : p.subscriptions) {
                                    auto filter = TopicFilter::parse(sub.filter);
                                    const auto granted = std::min<std::uint8_t>(sub.qos, 1);
                                    auto it = std::find_if(s->subs.begin(), s->subs.end(),
                                                           [&](const auto& e) { return e.first == filter; });
                                    if (it != s->subs.end()) {
                                        it->second = granted;
                                    } else {
                                        s->subs.emplace_back(filter, granted);
                                    }
                                    added.emplace_back(std::move(filter), granted);
                                    ack.granted.push_back(granted);
                                }
                            }
                            enqueue(*s, encode_packet(ack), false);
                            for (const auto& [filter, granted] : added) send_retained(*s, filter, granted);
                        } else if constexpr (std::is_same_v<T, Unsubscribe>) {
                            {
                                std::lock_guard lock(s->sub_mu);
                                for (const auto& f : p.filters)
                                    std::erase_if(s->subs, [&](const auto& e) { return e.first.str() == f; });
                            }
                            enqueue(*s, encode_packet(Unsuback{p.packet_id}), false);
                        } else if constexpr (std::is_same_v<T, Pingreq>) {
                            enqueue(*s, encode_packet(Pingresp{}), false);
                        } else if constexpr (std::is_same_v<T, Disconnect>) {
                            clean_disconnect = true;
                            open = false;
                        } else if constexpr (std::is_same_v<T, Puback>) {
                            // Acknowledgement of a broker-sent qos 1 message; nothing is retransmitted.
                        } else {
                            protocol_error();
                            open = false;
                        }
                    },
                    packet);
            }
            buffer.erase(buffer.begin(), buffer.begin() + static_cast<std::ptrdiff_t>(offset));
        }

        if (connected) unregister_session(s);
        if (will && !clean_disconnect) {
            Publish w{will->topic, will->message, std::min<std::uint8_t>(will->qos, 1), will->retain,
                      false, std::nullopt};
            if (w.qos == 1) w.packet_id = 1;
            if (w.retain) store_retained(w);
            route(w);
        }
        {
            std::lock_guard lock(s->q_mu);
            s->draining = true;
        }
        s->q_cv.notify_all();
        writer.join();
        s->sock.shutdown();
    }

    void reap() {
        std::lock_guard lock(conns_mu);
        for (auto it = conns.begin(); it != conns.end();) {
            if ((*it)->done) {
                (*it)->thread.join();
                it = conns.erase(it);
            } else {
                ++it;
            }
        }
    }

    void accept_loop() {
        while (!stopping) {
            const auto ready = net::wait_readable(listener, 100ms);
            reap();
            if (ready != net::WaitResult::Ready) continue;
            const int fd = ::accept4(listener.fd(), nullptr, nullptr, SOCK_CLOEXEC);
            if (fd < 0) continue;
            ++connections_accepted;
            auto conn = std::make_unique<Connection>();
            conn->session = std::make_shared<Session>(net::Socket(fd));
            Connection* raw = conn.get();
            {
                std::lock_guard lock(conns_mu);
                conns.push_back(std::move(conn));
            }
            raw->thread = std::thread([this, raw] {
                run_connection(raw->session);
                raw->done = true;
            });
        }
    }

    void shutdown_all() {
        std::list<std::unique_ptr<Connection>> all;
        {
            std::lock_guard lock(conns_mu);
            all.swap(conns);
        }
        for (auto& c : all) c->session->abort();
        for (auto& c : all)
            if (c->thread.joinable()) c->thread.join();
    }
};

Broker::Broker(BrokerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Broker::~Broker() { stop(); }

void Broker::start() {
    impl_->bind();
    impl_->stopping = false;
    impl_->accept_thread = std::thread([this] { impl_->accept_loop(); });
}

void Broker::serve() {
    impl_->bind();
    impl_->accept_loop();
}

void Broker::stop() {
    if (!impl_) return;
    impl_->stopping = true;
    if (impl_->accept_thread.joinable()) impl_->accept_thread.join();
    impl_->shutdown_all();
    impl_->listener.reset();
}

std::uint16_t Broker::port() const { return impl_->bound_port; }

std::size_t Broker::session_count() const {
    std::shared_lock lock(impl_->registry_mu);
    return impl_->registry.size();
}

BrokerStats Broker::stats() const {
    return {impl_->connections_accepted, impl_->publishes_received, impl_->messages_delivered,
            impl_->messages_dropped, impl_->keepalive_expiries, impl_->protocol_errors};
}

}  // namespace storetwin::mqtt
