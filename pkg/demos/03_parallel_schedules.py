"""Bob's and Charlie's halves of the protocol can run in any order.

Each party is a list of steps. The scheduler advances whichever party a
schedule names next, and holds a party waiting on a message that has not
been sent yet.
"""
import numpy as np

from ghzlocc.gates import haar_random_blocks
from ghzlocc.locc import Party, all_interleavings, count_interleavings
from ghzlocc.protocols import run_branch
from ghzlocc.qstate import random_state, state_distance

A, B, C = Party.ALICE, Party.BOB, Party.CHARLIE
rng = np.random.default_rng(3)
u, v = haar_random_blocks(1, rng), haar_random_blocks(1, rng)
initial = random_state(3, rng)
forced = {"a": 1, "b": 1, "c": 0}

reference, _, _, world = run_branch("ghz", u, v, initial, forced)
print("default order:", [f"{e.actor}:{e.step_label}" for e in world.transcript if e.kind != "resource_claim"][:6], "...")

print("Bob/Charlie interleavings:", count_interleavings({B: 6, C: 6}))
worst = 0.0
for middle in all_interleavings({B: 6, C: 6}):
    final = run_branch("ghz", u, v, initial, forced, [A] * 3 + middle + [A] * 3)[0]
    worst = max(worst, state_distance(final, reference)[0])
print(f"max deviation over all of them: {worst:.2e}")

# Bob scheduled before Alice has broadcast a: he simply waits.
final, _, _, world = run_branch("ghz", u, v, initial, forced, [B] + [A] * 3 + [B] * 5 + [C] * 6 + [A] * 3)
print("Bob-first schedule deviation:", state_distance(final, reference)[0])
