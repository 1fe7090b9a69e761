/* planted: tail is always locked, size misses the lock once in six writes */
void push(int v)
{
	mutex_lock(&ring_lock);
	tail = v;
	size = size + 1;
	mutex_unlock(&ring_lock);
}

void pop(void)
{
	mutex_lock(&ring_lock);
	tail = tail - 1;
	size = size - 1;
	mutex_unlock(&ring_lock);
}

void clear(void)
{
	mutex_lock(&ring_lock);
	tail = 0;
	size = 0;
	mutex_unlock(&ring_lock);
}

void grow(int n)
{
	mutex_lock(&ring_lock);
	tail = n;
	size = n;
	mutex_unlock(&ring_lock);
}

void shrink(int n)
{
	mutex_lock(&ring_lock);
	tail = n;
	size = n;
	mutex_unlock(&ring_lock);
}

void resize_hint(int n)
{
	size = n;
}
