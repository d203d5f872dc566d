import socket
import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from socrm import event_bus as eb


@pytest.fixture
def server():
    srv = eb.EventServer("127.0.0.1", 0).start()
    yield srv
    srv.stop()


events_strategy = st.builds(
    eb.FaceEvent,
    faces=st.integers(min_value=0, max_value=1_000_000),
    seq=st.integers(min_value=1, max_value=2 ** 40),
    timestamp_us=st.integers(min_value=0, max_value=2 ** 50),
)


class TestWireFormat:
    def test_decode_example_line(self):
        event = eb.decode_event('{"faces":2,"seq":7,"timestamp_us":140000}')
        assert event == eb.FaceEvent(2, 7, 140000)

    def test_unknown_fields_ignored(self):
        event = eb.decode_event('{"faces":1,"seq":2,"timestamp_us":3,"extra":"x"}')
        assert event == eb.FaceEvent(1, 2, 3)

    @pytest.mark.parametrize("line", [
        "not json",
        "[1,2,3]",
        '{"faces":-1,"seq":1,"timestamp_us":0}',
        '{"faces":1.5,"seq":1,"timestamp_us":0}',
        '{"faces":true,"seq":1,"timestamp_us":0}',
        '{"seq":1,"timestamp_us":0}',
        '{"faces":1,"seq":1}',
    ])
    def test_malformed_lines_rejected(self, line):
        with pytest.raises(eb.ProtocolError):
            eb.decode_event(line)

    @given(events_strategy)
    @settings(max_examples=200)
    def test_round_trip(self, event):
        assert eb.decode_event(eb.encode_event(event)) == event


class TestServer:
    def test_loopback_round_trip(self, server):
        with eb.Emitter(server.address) as emitter:
            sent = emitter.emit(2)
        received = server.get(timeout=2.0)
        assert received == sent
        assert received.faces == 2

    def test_emitter_seq_counts_up(self, server):
        with eb.Emitter(server.address) as emitter:
            assert [emitter.emit(f).seq for f in (0, 1, 2)] == [1, 2, 3]
        got = [server.get(timeout=2.0) for _ in range(3)]
        assert [e.seq for e in got] == [1, 2, 3]

    def test_in_order_delivery(self, server):
        with eb.Emitter(server.address) as emitter:
            for f in range(50):
                emitter.emit(f)
        got = [server.get(timeout=2.0) for _ in range(50)]
        assert [e.faces for e in got] == list(range(50))

    def test_malformed_lines_counted_and_skipped(self, server):
        with socket.create_connection(server.address) as sock:
            sock.sendall(b'{"faces":1,"seq":1,"timestamp_us":0}\n')
            sock.sendall(b"garbage line\n")
            sock.sendall(b'{"faces":-3,"seq":2,"timestamp_us":1}\n')
            sock.sendall(b'{"faces":2,"seq":3,"timestamp_us":2}\n')
        first = server.get(timeout=2.0)
        second = server.get(timeout=2.0)
        assert (first.faces, second.faces) == (1, 2)
        assert server.malformed_count == 2

    def test_non_monotonic_seq_skipped(self, server):
        with socket.create_connection(server.address) as sock:
            sock.sendall(b'{"faces":1,"seq":5,"timestamp_us":0}\n')
            sock.sendall(b'{"faces":9,"seq":5,"timestamp_us":1}\n')
            sock.sendall(b'{"faces":2,"seq":6,"timestamp_us":2}\n')
        assert server.get(timeout=2.0).faces == 1
        assert server.get(timeout=2.0).faces == 2
        assert server.malformed_count == 1

    def test_two_clients_monotonicity_independent(self, server):
        with eb.Emitter(server.address) as a, eb.Emitter(server.address) as b:
            for f in range(10):
                a.emit(f)
                b.emit(f + 100)
        got = [server.get(timeout=2.0) for _ in range(20)]
        assert server.malformed_count == 0
        low = [e.faces for e in got if e.faces < 100]
        high = [e.faces for e in got if e.faces >= 100]
        assert low == list(range(10))
        assert high == list(range(100, 110))

    def test_connection_drop_keeps_server_alive(self, server):
        sock = socket.create_connection(server.address)
        sock.sendall(b'{"faces":1,"seq":1,"timestamp_us":0}\n')
        sock.close()
        assert server.get(timeout=2.0).faces == 1
        with eb.Emitter(server.address) as emitter:
            emitter.emit(4)
        assert server.get(timeout=2.0).faces == 4

    def test_overflow_drops_oldest(self):
        srv = eb.EventServer("127.0.0.1", 0, capacity=5).start()
        try:
            with eb.Emitter(srv.address) as emitter:
                for f in range(10):
                    emitter.emit(f)
            deadline = time.monotonic() + 2.0
            while srv.dropped_count < 5 and time.monotonic() < deadline:
                time.sleep(0.01)
            assert srv.dropped_count == 5
            got = [srv.get(timeout=1.0) for _ in range(5)]
            assert [e.faces for e in got] == [5, 6, 7, 8, 9]
        finally:
            srv.stop()

    def test_bind_failure_surfaces(self, server):
        clash = eb.EventServer(*server.address)
        with pytest.raises(OSError):
            clash.start()


class TestEmitter:
    def test_connect_to_closed_port_raises_transport_error(self):
        sock = socket.socket()
        sock.bind(("127.0.0.1", 0))
        addr = sock.getsockname()
        sock.close()
        with pytest.raises(eb.TransportError):
            eb.Emitter(addr)

    def test_rejects_negative_faces(self, server):
        with eb.Emitter(server.address) as emitter:
            with pytest.raises(ValueError):
                emitter.emit(-1)


class TestReplay:
    def test_demo_trace(self):
        got = list(eb.replay([(0, 0), (1000, 1), (1000, 2), (1000, 3)],
                             fast_forward=True))
        assert [e.faces for e in got] == [0, 1, 2, 3]
        assert [e.seq for e in got] == [1, 2, 3, 4]
        assert [e.timestamp_us for e in got] == [0, 1000, 2000, 3000]

    def test_empty_trace(self):
        assert list(eb.replay([], fast_forward=True)) == []

    def test_fast_forward_is_instant_and_identical(self):
        trace = [(200_000, 1), (200_000, 2)]
        t0 = time.monotonic()
        fast = list(eb.replay(trace, fast_forward=True))
        assert time.monotonic() - t0 < 0.1
        assert fast == list(eb.replay(trace, fast_forward=True))

    def test_wall_clock_mode_sleeps(self):
        t0 = time.monotonic()
        list(eb.replay([(50_000, 1)], fast_forward=False))
        assert time.monotonic() - t0 >= 0.045

    def test_rejects_negative_delay(self):
        with pytest.raises(ValueError):
            list(eb.replay([(-1, 0)], fast_forward=True))


def test_load_trace(tmp_path):
    path = tmp_path / "trace.txt"
    path.write_text("# demo\n0 0\n1000 1\n\n1000 2  # two faces\n")
    assert eb.load_trace(path) == [(0, 0), (1000, 1), (1000, 2)]
