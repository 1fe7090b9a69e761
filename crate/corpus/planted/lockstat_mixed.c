/* planted: head is updated under q_lock everywhere except in the fast path */
void q_push(int v)
{
	mutex_lock(&q_lock);
	head = v;
	mutex_unlock(&q_lock);
}

void q_pop(void)
{
	mutex_lock(&q_lock);
	head = head - 1;
	mutex_unlock(&q_lock);
}

void q_reset(void)
{
	mutex_lock(&q_lock);
	head = 0;
	mutex_unlock(&q_lock);
}

void q_fill(int n)
{
	mutex_lock(&q_lock);
	while (n) {
		head = n;
		n = n - 1;
	}
	mutex_unlock(&q_lock);
}

void q_fast(int v)
{
	if (v)
		head = v;
}
