# Two clients; a trying client enters its critical section next.
state idle init {}
state try1 {t1}
state crit1 {c1}
state try2 {t2}
state crit2 {c2}
edge idle try1
edge idle try2
edge try1 crit1
edge crit1 idle
edge try2 crit2
edge crit2 idle
