/* planted: two spawned workers take the same pair of locks in opposite orders */
void *producer(void *arg)
{
	mutex_lock(&buf_lock);
	mutex_lock(&count_lock);
	produce(arg);
	mutex_unlock(&count_lock);
	mutex_unlock(&buf_lock);
	return 0;
}

void *consumer(void *arg)
{
	mutex_lock(&count_lock);
	mutex_lock(&buf_lock);
	consume(arg);
	mutex_unlock(&buf_lock);
	mutex_unlock(&count_lock);
	return 0;
}

int main(void)
{
	pthread_create(&t1, 0, producer, 0);
	pthread_create(&t2, 0, consumer, 0);
	return 0;
}
