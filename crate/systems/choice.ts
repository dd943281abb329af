# `p` may be postponed forever.
state s0 init {}
state s1 {p}
edge s0 s0
edge s0 s1
edge s1 s0
