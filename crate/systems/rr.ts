# Every request is answered in the next step.
state a init {req}
state b {resp}
edge a b
edge b a
