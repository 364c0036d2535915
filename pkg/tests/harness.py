"""Two-engine driver that hands actions across by hand, no simulator."""
from sensorkey.engine import Engine, EngineConfig, KeyEstablished, PacketArrival, Send


class Pair:
    def __init__(self, net, a=1, b=2, config=None, seed=0):
        self.config = config or EngineConfig()
        self.eng = {
            a: Engine(net.bundle(a), self.config, seed=f"{seed}|{a}"),
            b: Engine(net.bundle(b), self.config, seed=f"{seed}|{b}"),
        }
        self.a, self.b = a, b

    def other(self, node):
        return self.b if node == self.a else self.a

    def start(self, round=1, now=0):
        return {n: e.start_stage(round, now) for n, e in self.eng.items()}

    def feed(self, src, sends, now):
        """Deliver ``src``'s Send actions to its peer; returns the peer's actions."""
        dst = self.other(src)
        out = []
        for s in sends:
            if isinstance(s, Send):
                out += self.eng[dst].handle(PacketArrival(src, s.msg_type, s.body, now))
        return out

    def run_clean(self, round=1, now=0):
        """Full lossless exchange: New1s cross, New2s cross."""
        first = self.start(round, now)
        new2_from_b = self.feed(self.a, first[self.a], now + 1)
        new2_from_a = self.feed(self.b, first[self.b], now + 1)
        done_a = self.feed(self.b, new2_from_b, now + 2)
        done_b = self.feed(self.a, new2_from_a, now + 2)
        return done_a + done_b


def sends(actions, msg_type=None):
    return [a for a in actions if isinstance(a, Send) and (msg_type is None or a.msg_type == msg_type)]


def keys(actions):
    return [a for a in actions if isinstance(a, KeyEstablished)]
