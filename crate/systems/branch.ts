state s0 init {}
state s1 {q}
state s2 {}
edge s0 s1
edge s0 s2
edge s1 s1
edge s2 s2
